#pragma once

// Reifenberg flatness of a discretized planar domain: the best line through a
// boundary point at a given scale, the two-sided separation test, multi-scale
// profiles and (eps, r0) certification.

#include "reiflab/domain.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reiflab {

struct FlatnessOptions
{
  int coarse_angles = 720;        // sweep over [0, pi)
  double refine_tolerance = 1e-4; // golden-section bracket width, radians
  std::size_t max_points = 2000;  // stratified subsample above this count
  int jobs = 0;                   // 0: REIFLAB_JOBS or hardware concurrency
};

/// Line through x fitted at scale r. `epsilon` is the normalized two-sided
/// Hausdorff deviation between the boundary samples in B(x, r) and the chord
/// of the line in B(x, r). `orientation` is 0 until a separation test has
/// decided which side is inside; after a successful test the normal points
/// into the domain and orientation records whether the fitted normal had to
/// be flipped (+1: kept, -1: flipped).
struct FlatnessSample
{
  Vec2 x = Vec2::Zero();
  double r = 0;
  Hyperplane plane;
  double epsilon = 0;
  int orientation = 0;

  Vec2 normal() const { return plane.normal; }
};

/// Deviation (already divided by r) of the line through x with the given
/// unit normal from the boundary samples in B(x, r).
double line_deviation(const Domain& d, const Vec2& x, double r, const Vec2& normal);

/// Minimizes line_deviation over all lines through x: coarse angle sweep,
/// then golden-section refinement around the best coarse angle.
FlatnessSample best_hyperplane(const Domain& d, const Vec2& x, double r, const FlatnessOptions& opts = {});

enum class SeparationStatus { Separated, Violation, Degenerate };

struct SeparationResult
{
  SeparationStatus status = SeparationStatus::Degenerate;
  FlatnessSample sample;
  double slab_epsilon = 0;
  std::size_t plus_cells = 0, plus_inside = 0;
  std::size_t minus_cells = 0, minus_inside = 0;
  std::optional<Cell> witness;
  Vec2 witness_point = Vec2::Zero();

  bool ok() const { return status == SeparationStatus::Separated; }
};

std::string to_string(SeparationStatus s);

/// Tests the two caps of B(x, r) beyond distance 2 eps r from the plane
/// (eroded by one cell) against the occupancy grid: one must be entirely
/// inside, the other entirely outside. `slab_epsilon` defaults to the
/// sample's own epsilon.
SeparationResult separation_check(const Domain& d, const FlatnessSample& s,
                                  std::optional<double> slab_epsilon = std::nullopt);

/// r0 * 2^-k for k < n_scales, dropping scales below 10 cells.
std::vector<double> scale_grid(const Domain& d, double r0, int n_scales);

/// Deterministic spatially stratified subset of the boundary samples with at
/// least `max_points` members (all of them when there are at most that many).
std::vector<Eigen::Index> stratified_boundary_subset(const Domain& d, std::size_t max_points);

struct ProfileEntry
{
  FlatnessSample sample;
  SeparationStatus separation = SeparationStatus::Degenerate;
  std::optional<Cell> witness;
};

struct ScaleSummary
{
  double r = 0;
  double sup_epsilon = 0;
  std::size_t separation_failures = 0;
};

struct FlatnessReport
{
  double r0 = 0;
  double resolution = 0;
  std::vector<double> scales;
  std::vector<ProfileEntry> entries;
  std::vector<ScaleSummary> per_scale;
  double sup_epsilon = 0;
  Vec2 worst_x = Vec2::Zero();
  double worst_r = 0;
  bool separation_ok = false;         // at r0, the definitional scale
  bool separation_all_scales = false; // at every grid scale
  bool subsampled = false;
  std::size_t boundary_count = 0;
  std::size_t evaluated_points = 0;
  double slab_epsilon = -1; // < 0: each sample's own epsilon

  double r_min() const { return scales.empty() ? 0 : scales.back(); }
  /// 2 * resolution / r_min.
  double margin() const;
};

/// Best line and separation test at every (sub)sampled boundary point and
/// every grid scale. Separation uses `slab_epsilon` when given, otherwise
/// each sample's own epsilon.
FlatnessReport flatness_profile(const Domain& d, double r0, int n_scales, const FlatnessOptions& opts = {},
                                std::optional<double> slab_epsilon = std::nullopt);

struct Certificate
{
  bool certified = false;
  double eps = 0;
  double r0 = 0;
  double r_min = 0;
  double sup_epsilon = 0;
  double margin = 0;
  bool flat = false;            // condition i) with the margin
  bool separation_r0 = false;   // condition ii) at r0
  bool separation_all = false;  // recorded at every scale
  std::string reason;
  FlatnessReport report;
};

inline constexpr int kDefaultCertifyScales = 1;

/// Certificate iff sup epsilon + 2 res / r_min <= eps over the scale grid and
/// separation holds at r0 with slab width 2 eps r0.
Certificate certify(const Domain& d, double eps, double r0, int n_scales = kDefaultCertifyScales,
                    const FlatnessOptions& opts = {});

struct AngleCheck
{
  double cosine = 0; // |<nu_r, nu_Mr>|
  double bound = 0;  // 1 - (M + 1) eps
  double margin = 0; // 2 res / r
  bool pass = false;
  FlatnessSample fine, coarse;
};

AngleCheck normal_angle_check(const Domain& d, const Vec2& x, double r, double M, double eps,
                              const FlatnessOptions& opts = {});

struct PropagationScale
{
  double r = 0;
  bool pass = false;
  std::size_t failures = 0;
  std::size_t evaluated = 0;
  std::optional<Vec2> witness_x;
};

struct PropagationReport
{
  double eps = 0;
  double r0 = 0;
  double admissible_step = 0; // (1 - eps) / (3 eps)
  std::vector<PropagationScale> scales;
  bool pass = false;
};

/// Separation with slab 2 eps r at every dyadic scale from r0 down to 10 cells.
PropagationReport separation_propagation_check(const Domain& d, double r0, double eps,
                                               const FlatnessOptions& opts = {});

} // namespace reiflab
