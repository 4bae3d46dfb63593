#pragma once

// Curves of the Jones construction: Y-points along oriented normals, dyadic
// chains from an interior point towards the boundary, the composite curve
// joining two points, and the cigar/length verification.

#include "reiflab/flatness.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace reiflab {

class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> vertices);

  void push_back(const Vec2& v);
  void append(const Polyline& other);
  Polyline reversed() const;

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& front() const { return vertices_.front(); }
  const Vec2& back() const { return vertices_.back(); }

  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  /// Arc length from the first vertex to vertex k.
  double arc_length(std::size_t k) const { return cumulative_[k]; }
  /// Point at arc length s, clamped to [0, length()].
  Vec2 at(double s) const;

private:
  std::vector<Vec2> vertices_;
  std::vector<double> cumulative_;
};

/// x0 + rho * nu, nu the inward normal of the best line at (x0, rho).
Vec2 y_point(const Domain& d, const Vec2& x0, double rho, const FlatnessOptions& opts = {});

struct Chain
{
  Polyline curve;
  Vec2 x0 = Vec2::Zero();   // nearest boundary sample to x
  double distance = 0;      // d(x, complement)
  double r = 0;
  int k0 = 0;               // smallest scale used is 2^-k0 r
  bool short_case = false;  // r <= 2 d(x, complement): single segment
  bool floor_limited = false; // k0 lowered to keep scales >= 10 cells
};

/// Chain from x to Y(x0, r). With r0 given, r must not exceed r0 / 7.
Chain gamma_chain(const Domain& d, const Vec2& x, double r, std::optional<double> r0 = std::nullopt,
                  const FlatnessOptions& opts = {});

struct ChainCheck
{
  double length = 0;
  double length_bound = 0; // 4 r
  double worst_ratio = 0;  // min over samples of d(z, complement) / d(z, x)
  Vec2 worst_z = Vec2::Zero();
  double slack = 0;        // 2 res, granted to d(z, complement)
  std::size_t n_samples = 0;
  bool escaped = false;    // some sample lies outside the domain
  bool length_ok = false;
  bool cigar_ok = false;

  bool pass() const { return length_ok && cigar_ok; }
};

inline constexpr double kChainCigarConstant = 29.0 / 240.0;

ChainCheck verify_chain(const Domain& d, const Chain& chain);

/// Straight segment when either endpoint lies at least 2 d(x, y) from the
/// complement; otherwise both chains at r = d(x, y) joined by a bridge.
Polyline jones_curve(const Domain& d, const Vec2& x, const Vec2& y, double r0, const FlatnessOptions& opts = {});

inline constexpr double kJonesDelta = 1.0 / 450.0;
inline constexpr double kJonesLengthFactor = 15.0;

struct CigarReport
{
  Polyline curve;
  Vec2 x = Vec2::Zero(), y = Vec2::Zero();
  double length_ratio = 0;     // length / d(x, y)
  double worst_delta = 0;      // raw cigar quotient minimum
  double worst_delta_slack = 0; // same with 2 res added to d(z, complement)
  Vec2 worst_z = Vec2::Zero();
  std::size_t n_samples = 0;
  bool escaped = false;        // some sample lies outside the domain
  double slack = 0;            // 2 res
  double margin = 0;           // 4 res / d(x, y)
  double delta = 0;
  bool pass = false;
};

CigarReport verify_curve(const Domain& d, const Polyline& curve, const Vec2& x, const Vec2& y, double delta);

/// Max of d(z, x) d(z, y) / d(x, y) over the sampler's points of [x, y].
double segment_cigar_max(const Vec2& x, const Vec2& y, double step);

struct JonesPair
{
  Vec2 x = Vec2::Zero(), y = Vec2::Zero();
  double distance = 0;
  double length_ratio = 0;
  double worst_delta = 0;
  double worst_delta_slack = 0;
  double margin = 0;
  double delta_value = 0; // min(worst_delta_slack, 1 / length_ratio), 0 on escape
  bool segment = false;
  bool escaped = false;
  bool pass = false; // inside, length within 15 d(x, y) + margin, cigar at 1/450
};

struct JonesConstant
{
  double delta_star = 0;
  std::size_t worst = 0;
  double max_length_ratio = 0;
  double min_worst_delta = 0;
  std::vector<JonesPair> pairs;
  std::uint64_t seed = 0;
  double R0 = 0;
};

/// Seeded pairs x, y in the domain with 10 res <= d(x, y) <= R0, x drawn at
/// least 4 R0 inside the box.
JonesConstant empirical_jones_constant(const Domain& d, double R0, std::size_t n_pairs, std::uint64_t seed,
                                       double r0, const FlatnessOptions& opts = {});

} // namespace reiflab
