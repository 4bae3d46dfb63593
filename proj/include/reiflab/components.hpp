#pragma once

// Connected components of a domain (4-connectivity) and the count and
// separation bounds for flat domains.

#include "reiflab/metrics.hpp"

#include <optional>
#include <vector>

namespace reiflab {

struct ComponentReport
{
  std::size_t n = 0;
  std::vector<Domain> components; // same grid, one mask each
  std::vector<double> areas;
  double min_pairwise_separation = 0; // infinite for a single component
  std::pair<Vec2, Vec2> separation_witness{Vec2::Zero(), Vec2::Zero()};
  bool clipped = false; // some component touches the box
};

/// Components sorted by area, largest first; ties by the first cell in
/// row-major order.
ComponentReport components(const Domain& d);

/// 20^N / omega_N * area / r0^N with N = 2.
double component_count_bound(double area, double r0);

struct CountCheck
{
  std::size_t n = 0;
  double bound = 0;
  CheckStatus status = CheckStatus::Fail;
  std::string reason;
};

struct SeparationBoundCheck
{
  double separation = 0;
  double bound = 0;  // r0 / 70
  double margin = 0; // res * sqrt 2
  std::pair<Vec2, Vec2> witness{Vec2::Zero(), Vec2::Zero()};
  CheckStatus status = CheckStatus::Fail;
  std::string reason;
};

/// With `eps` given and opts.certify set, the domain is certified at
/// (eps, r0) first; a failure makes the check inapplicable.
CountCheck check_count_bound(const Domain& d, double r0, std::optional<double> eps = std::nullopt,
                             const CheckOptions& opts = {});
CountCheck check_count_bound(const ComponentReport& rep, double r0);

SeparationBoundCheck check_separation_bound(const Domain& d, double r0, std::optional<double> eps = std::nullopt,
                                            const CheckOptions& opts = {});
SeparationBoundCheck check_separation_bound(const ComponentReport& rep, double resolution, double r0);

} // namespace reiflab
