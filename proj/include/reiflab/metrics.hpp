#pragma once

// Distances between domains, symmetric-difference measure, radii, and the
// inequality checks comparing them.

#include "reiflab/flatness.hpp"

#include <string>
#include <vector>

namespace reiflab {

/// Outcome of a bound check. Inapplicable: a hypothesis failed. Vacuous:
/// nothing to assert (for instance fewer than two components).
enum class CheckStatus { Pass, Fail, Inapplicable, Vacuous };

std::string to_string(CheckStatus s);
/// 0 pass or vacuous, 1 fail, 3 inapplicable.
int exit_code(CheckStatus s);

enum class DistanceMode { Sets, Complements, Boundaries };

std::string to_string(DistanceMode m);
DistanceMode parse_distance_mode(const std::string& s);

struct DistanceReport
{
  DistanceMode mode = DistanceMode::Sets;
  double value = 0;
  Vec2 from = Vec2::Zero(); // realizes the sup: d(from, other set) = value
  Vec2 to = Vec2::Zero();
  bool clipped = false;
};

/// Exact Euclidean distance transform over the cell grid: for every cell,
/// the squared distance (in cells) to the nearest cell whose occupancy equals
/// `target`, and the index j * width + i of that cell (-1 if none).
struct DistanceTransform
{
  int width = 0, height = 0;
  std::vector<double> dist2;
  std::vector<long long> nearest;
};

DistanceTransform distance_transform(const OccupancyGrid& g, bool target);

DistanceReport domain_distance(const Domain& X, const Domain& Y, DistanceMode mode);

/// |X triangle Y| on the shared grid.
double symmetric_difference_measure(const Domain& X, const Domain& Y);

struct RadiiReport
{
  double rad = 0;
  double big_rad = 0;
  double diam = 0;
  Vec2 rad_center = Vec2::Zero();
  Vec2 big_rad_center = Vec2::Zero();
  Vec2 diam_a = Vec2::Zero(), diam_b = Vec2::Zero();
};

/// Largest inscribed radius: max over inside cells of the distance to the
/// nearest outside cell center, less half a cell. Works on clipped domains.
double inner_radius(const Domain& d, Vec2* center = nullptr);

/// Convex hull of the inside cell centers, counter-clockwise.
std::vector<Vec2> inside_hull(const Domain& d);

RadiiReport radii(const Domain& d);

struct RadiusCheck
{
  double rad = 0;
  double bound = 0;  // r0 / 4
  double margin = 0; // res * sqrt 2
  CheckStatus status = CheckStatus::Fail;
};

RadiusCheck check_inner_radius_bound(const Domain& d, double r0);

struct CheckOptions
{
  bool certify = true; // certify inputs at (eps, r0) first
  int n_scales = kDefaultCertifyScales;
  FlatnessOptions flatness;
};

struct BoundaryVsSetsCheck
{
  double boundaries = 0;
  double sets = 0;
  double complements = 0;
  double rhs = 0;    // 4 / (1 - 2 eps) min(sets, complements)
  double margin = 0;
  double ratio = 0;  // boundaries / min(sets, complements)
  bool x_certified = false, y_certified = false;
  bool hypothesis = false; // d_H of boundaries <= 2 r0
  CheckStatus status = CheckStatus::Fail;
  std::string reason;
};

BoundaryVsSetsCheck check_boundary_vs_sets(const Domain& X, const Domain& Y, double eps, double r0,
                                    const CheckOptions& opts = {});

struct MeasureBranch
{
  double distance = 0;
  double rhs = 0; // 8 / (1 - 2 eps) (|X triangle Y| / omega_2)^(1/2)
  bool hypothesis = false; // distance <= 4 r0
  CheckStatus status = CheckStatus::Fail;
};

struct MeasureBoundsCheck
{
  double symmetric_difference = 0;
  double margin = 0;
  MeasureBranch sets, complements;
  bool x_certified = false, y_certified = false;
  CheckStatus status = CheckStatus::Fail;
  std::string reason;
};

MeasureBoundsCheck check_measure_bounds(const Domain& X, const Domain& Y, double eps, double r0,
                                  const CheckOptions& opts = {});

struct UnitBallVolume
{
  int n = 0;
  double omega = 0;
  double previous = 0;  // omega_{N-1}
  double lower = 0;     // omega_{N-1} / 2^(N-1)
  bool inequality = false;
};

UnitBallVolume unit_ball_volume(int n);

} // namespace reiflab
