#include "reiflab/metrics.hpp"
#include "reiflab/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace reiflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_grid(const Domain& X, const Domain& Y)
{
  if (X.width() != Y.width() || X.height() != Y.height() || X.resolution() != Y.resolution() ||
      X.bbox().lo != Y.bbox().lo)
    throw Error("domains do not share a grid");
}

Vec2 center_of(const Domain& d, long long idx)
{
  const auto w = static_cast<long long>(d.width());
  return d.cell_center(static_cast<int>(idx % w), static_cast<int>(idx / w));
}

struct OneSided
{
  double dist2 = -1;
  long long from = -1, to = -1;
};

double cross(const Vec2& o, const Vec2& a, const Vec2& b)
{
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

} // namespace

std::string to_string(CheckStatus s)
{
  switch (s) {
  case CheckStatus::Pass:
    return "pass";
  case CheckStatus::Fail:
    return "fail";
  case CheckStatus::Inapplicable:
    return "inapplicable";
  case CheckStatus::Vacuous:
    return "vacuous";
  }
  return "unknown";
}

int exit_code(CheckStatus s)
{
  switch (s) {
  case CheckStatus::Pass:
  case CheckStatus::Vacuous:
    return 0;
  case CheckStatus::Fail:
    return 1;
  case CheckStatus::Inapplicable:
    return 3;
  }
  return 2;
}

std::string to_string(DistanceMode m)
{
  switch (m) {
  case DistanceMode::Sets:
    return "sets";
  case DistanceMode::Complements:
    return "complements";
  case DistanceMode::Boundaries:
    return "boundaries";
  }
  return "unknown";
}

DistanceMode parse_distance_mode(const std::string& s)
{
  if (s == "sets")
    return DistanceMode::Sets;
  if (s == "complements")
    return DistanceMode::Complements;
  if (s == "boundaries")
    return DistanceMode::Boundaries;
  throw Error("unknown distance mode: " + s);
}

namespace {

// Exact squared distance (in cells) from every cell to the nearest cell whose
// occupancy equals `target`. Rows are handed to visit(j, i, dist2, nearest)
// one at a time, so callers that only reduce need no per-cell output.
template <typename Visit>
void distance_rows(const OccupancyGrid& g, bool target, Visit&& visit)
{
  const int w = g.width(), h = g.height();
  const auto W = static_cast<std::size_t>(w);

  // Column pass: nearest target row within the same column.
  std::vector<int> near_row(g.cell_count(), -1);
  std::vector<int> last(W, -1);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      if (g.get(i, j) == target)
        last[static_cast<std::size_t>(i)] = j;
      near_row[static_cast<std::size_t>(j) * W + static_cast<std::size_t>(i)] = last[static_cast<std::size_t>(i)];
    }
  std::fill(last.begin(), last.end(), -1);
  for (int j = h - 1; j >= 0; --j)
    for (int i = 0; i < w; ++i) {
      int& next = last[static_cast<std::size_t>(i)];
      if (g.get(i, j) == target)
        next = j;
      int& cur = near_row[static_cast<std::size_t>(j) * W + static_cast<std::size_t>(i)];
      if (next >= 0 && (cur < 0 || next - j < j - cur))
        cur = next;
    }

  // Row pass: lower envelope of the parabolas (i - q)^2 + g_q^2.
  parallel_for(static_cast<std::size_t>(h), default_jobs(), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const std::size_t row = jj * W;
    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> f(W);
    v.reserve(W);
    z.reserve(W + 1);
    for (int q = 0; q < w; ++q) {
      const int r = near_row[row + static_cast<std::size_t>(q)];
      f[static_cast<std::size_t>(q)] = r < 0 ? kInf : static_cast<double>((r - j) * (r - j));
    }
    auto meet = [&](int p, int q) {
      return ((f[static_cast<std::size_t>(q)] + q * q) - (f[static_cast<std::size_t>(p)] + p * p)) /
             (2.0 * (q - p));
    };
    for (int q = 0; q < w; ++q) {
      if (f[static_cast<std::size_t>(q)] == kInf)
        continue;
      double s = -kInf;
      while (!v.empty()) {
        s = meet(v.back(), q);
        if (s > z[v.size() - 1])
          break;
        v.pop_back();
        z.pop_back();
      }
      if (v.empty()) {
        v.push_back(q);
        z.assign({-kInf, kInf});
        continue;
      }
      z.back() = s;
      v.push_back(q);
      z.push_back(kInf);
    }
    if (v.empty())
      return;
    std::size_t k = 0;
    for (int i = 0; i < w; ++i) {
      while (z[k + 1] < i)
        ++k;
      const int q = v[k];
      const double di = i - q;
      visit(j, i, di * di + f[static_cast<std::size_t>(q)],
            static_cast<long long>(near_row[row + static_cast<std::size_t>(q)]) * w + q);
    }
  });
}

// sup over cells of `a` equal to `value` of the distance to cells of `b`
// equal to `value`.
OneSided one_sided(const OccupancyGrid& a, const OccupancyGrid& b, bool value)
{
  std::vector<OneSided> rows(static_cast<std::size_t>(a.height()));
  distance_rows(b, value, [&](int j, int i, double d2, long long nearest) {
    OneSided& o = rows[static_cast<std::size_t>(j)];
    if (a.get(i, j) == value && d2 > o.dist2) {
      o.dist2 = d2;
      o.from = static_cast<long long>(j) * a.width() + i;
      o.to = nearest;
    }
  });
  OneSided out;
  for (const OneSided& o : rows)
    if (o.dist2 > out.dist2)
      out = o;
  if (out.from < 0 || out.to < 0)
    throw Error("empty set");
  return out;
}

} // namespace

DistanceTransform distance_transform(const OccupancyGrid& g, bool target)
{
  DistanceTransform dt;
  dt.width = g.width();
  dt.height = g.height();
  dt.dist2.assign(g.cell_count(), kInf);
  dt.nearest.assign(g.cell_count(), -1);
  distance_rows(g, target, [&](int j, int i, double d2, long long nearest) {
    const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(dt.width) + static_cast<std::size_t>(i);
    dt.dist2[k] = d2;
    dt.nearest[k] = nearest;
  });
  return dt;
}

DistanceReport domain_distance(const Domain& X, const Domain& Y, DistanceMode mode)
{
  check_same_grid(X, Y);
  DistanceReport rep;
  rep.mode = mode;
  if (mode == DistanceMode::Boundaries) {
    const auto hw = hausdorff_witness(X.boundary(), Y.boundary());
    rep.value = hw.value;
    rep.from = hw.from;
    rep.to = hw.to;
    return rep;
  }
  const bool value = mode == DistanceMode::Sets;
  rep.clipped = mode == DistanceMode::Complements;
  const OneSided a = one_sided(X.occupancy(), Y.occupancy(), value);
  const OneSided b = one_sided(Y.occupancy(), X.occupancy(), value);
  const OneSided& w = b.dist2 > a.dist2 ? b : a;
  rep.value = std::sqrt(w.dist2) * X.resolution();
  rep.from = center_of(X, w.from);
  rep.to = center_of(X, w.to);
  return rep;
}

double symmetric_difference_measure(const Domain& X, const Domain& Y)
{
  check_same_grid(X, Y);
  const auto& a = X.occupancy().words();
  const auto& b = Y.occupancy().words();
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    n += static_cast<std::size_t>(std::popcount(a[k] ^ b[k]));
  return static_cast<double>(n) * X.resolution() * X.resolution();
}

double inner_radius(const Domain& d, Vec2* center)
{
  if (d.occupancy().count() == 0)
    throw Error("empty domain");
  // Per-row maxima keep memory at one int per cell.
  struct RowBest
  {
    double dist2 = -1;
    long long at = -1;
  };
  std::vector<RowBest> rows(static_cast<std::size_t>(d.height()));
  distance_rows(d.occupancy(), false, [&](int j, int i, double d2, long long) {
    RowBest& b = rows[static_cast<std::size_t>(j)];
    if (d.inside(i, j) && d2 > b.dist2) {
      b.dist2 = d2;
      b.at = static_cast<long long>(j) * d.width() + i;
    }
  });
  RowBest best;
  for (const RowBest& b : rows)
    if (b.dist2 > best.dist2)
      best = b;
  if (best.dist2 == kInf)
    throw Error("domain has no outside cell");
  if (center)
    *center = center_of(d, best.at);
  return std::sqrt(best.dist2) * d.resolution() - d.resolution() / 2;
}

std::vector<Vec2> inside_hull(const Domain& d)
{
  std::vector<Vec2> pts;
  const int w = d.width();
  for (int j = 0; j < d.height(); ++j) {
    const std::uint64_t* row = d.occupancy().row(j);
    int first = -1, last = -1;
    for (std::size_t k = 0; k < d.occupancy().words_per_row(); ++k)
      if (row[k]) {
        if (first < 0)
          first = static_cast<int>(k * 64) + std::countr_zero(row[k]);
        last = static_cast<int>(k * 64) + 63 - std::countl_zero(row[k]);
      }
    if (first < 0)
      continue;
    pts.push_back(d.cell_center(first, j));
    if (last != first && last < w)
      pts.push_back(d.cell_center(last, j));
  }
  if (pts.empty())
    throw Error("empty domain");
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3)
    return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0)
      --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

RadiiReport radii(const Domain& d)
{
  if (d.touches_bbox())
    throw Error("unbounded at this clip");
  RadiiReport rep;
  rep.rad = inner_radius(d, &rep.rad_center);
  const std::vector<Vec2> hull = inside_hull(d);

  // Diameter: rotating calipers over antipodal vertex pairs.
  const std::size_t m = hull.size();
  if (m == 1) {
    rep.diam_a = rep.diam_b = hull[0];
  } else if (m == 2) {
    rep.diam_a = hull[0];
    rep.diam_b = hull[1];
  } else {
    double best = -1;
    std::size_t j = 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t ni = (i + 1) % m;
      while (std::abs(cross(hull[i], hull[ni], hull[(j + 1) % m])) > std::abs(cross(hull[i], hull[ni], hull[j])))
        j = (j + 1) % m;
      for (std::size_t c : {i, ni}) {
        const double dd = (hull[c] - hull[j]).squaredNorm();
        if (dd > best) {
          best = dd;
          rep.diam_a = hull[c];
          rep.diam_b = hull[j];
        }
      }
    }
  }
  rep.diam = (rep.diam_a - rep.diam_b).norm();

  // Outer radius: the farthest inside point from any center is a hull vertex.
  std::vector<std::pair<double, long long>> per_row(static_cast<std::size_t>(d.height()), {kInf, -1});
  parallel_for(per_row.size(), default_jobs(), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < d.width(); ++i) {
      if (!d.inside(i, j))
        continue;
      const Vec2 c = d.cell_center(i, j);
      double far = 0;
      for (const Vec2& v : hull)
        far = std::max(far, (c - v).squaredNorm());
      if (far < per_row[jj].first)
        per_row[jj] = {far, static_cast<long long>(jj) * d.width() + i};
    }
  });
  const auto best = std::min_element(per_row.begin(), per_row.end(),
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
  rep.big_rad = std::sqrt(best->first);
  rep.big_rad_center = center_of(d, best->second);
  return rep;
}

RadiusCheck check_inner_radius_bound(const Domain& d, double r0)
{
  if (!(r0 > 0))
    throw Error("r0 must be positive");
  RadiusCheck c;
  c.rad = inner_radius(d);
  c.bound = r0 / 4;
  c.margin = d.resolution() * std::numbers::sqrt2;
  c.status = c.rad >= c.bound - c.margin ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

namespace {

bool certified(const Domain& d, double eps, double r0, const CheckOptions& opts)
{
  return certify(d, eps, r0, opts.n_scales, opts.flatness).certified;
}

void check_eps(double eps)
{
  if (!(eps >= 0 && eps < 0.5))
    throw Error("eps must lie in [0, 1/2)");
}

} // namespace

BoundaryVsSetsCheck check_boundary_vs_sets(const Domain& X, const Domain& Y, double eps, double r0,
                                    const CheckOptions& opts)
{
  check_eps(eps);
  check_same_grid(X, Y);
  BoundaryVsSetsCheck c;
  if (opts.certify) {
    c.x_certified = certified(X, eps, r0, opts);
    c.y_certified = certified(Y, eps, r0, opts);
    if (!c.x_certified || !c.y_certified) {
      c.status = CheckStatus::Inapplicable;
      c.reason = "hypothesis not met: domain not certified at (eps, r0)";
      return c;
    }
  }
  c.boundaries = domain_distance(X, Y, DistanceMode::Boundaries).value;
  c.hypothesis = c.boundaries <= 2 * r0;
  if (!c.hypothesis) {
    c.status = CheckStatus::Inapplicable;
    c.reason = "hypothesis not met: boundary distance exceeds 2 r0";
    return c;
  }
  c.sets = domain_distance(X, Y, DistanceMode::Sets).value;
  c.complements = domain_distance(X, Y, DistanceMode::Complements).value;
  const double m = std::min(c.sets, c.complements);
  const double k = 4 / (1 - 2 * eps);
  c.rhs = k * m;
  c.margin = 2 * std::numbers::sqrt2 * X.resolution() * (1 + k);
  c.ratio = m > 0 ? c.boundaries / m : (c.boundaries > 0 ? kInf : 0);
  c.status = c.boundaries <= c.rhs + c.margin ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

MeasureBoundsCheck check_measure_bounds(const Domain& X, const Domain& Y, double eps, double r0,
                                  const CheckOptions& opts)
{
  check_eps(eps);
  check_same_grid(X, Y);
  MeasureBoundsCheck c;
  if (opts.certify) {
    c.x_certified = certified(X, eps, r0, opts);
    c.y_certified = certified(Y, eps, r0, opts);
    if (!c.x_certified || !c.y_certified) {
      c.status = CheckStatus::Inapplicable;
      c.reason = "hypothesis not met: domain not certified at (eps, r0)";
      return c;
    }
  }
  c.symmetric_difference = symmetric_difference_measure(X, Y);
  c.margin = 2 * std::numbers::sqrt2 * X.resolution();
  const double rhs = 8 / (1 - 2 * eps) * std::sqrt(c.symmetric_difference / std::numbers::pi);
  auto branch = [&](DistanceMode mode) {
    MeasureBranch b;
    b.distance = domain_distance(X, Y, mode).value;
    b.rhs = rhs;
    b.hypothesis = b.distance <= 4 * r0;
    if (!b.hypothesis)
      b.status = CheckStatus::Inapplicable;
    else
      b.status = b.distance <= rhs + c.margin ? CheckStatus::Pass : CheckStatus::Fail;
    return b;
  };
  c.sets = branch(DistanceMode::Sets);
  c.complements = branch(DistanceMode::Complements);
  if (c.sets.status == CheckStatus::Fail || c.complements.status == CheckStatus::Fail)
    c.status = CheckStatus::Fail;
  else if (c.sets.status == CheckStatus::Inapplicable && c.complements.status == CheckStatus::Inapplicable) {
    c.status = CheckStatus::Inapplicable;
    c.reason = "hypothesis not met: distances exceed 4 r0";
  } else
    c.status = CheckStatus::Pass;
  return c;
}

UnitBallVolume unit_ball_volume(int n)
{
  if (n < 1 || n > 20)
    throw Error("dimension must lie in [1, 20]");
  std::vector<double> omega(static_cast<std::size_t>(n) + 1);
  omega[0] = 1;
  omega[1] = 2;
  for (int k = 2; k <= n; ++k)
    omega[static_cast<std::size_t>(k)] = 2 * std::numbers::pi / k * omega[static_cast<std::size_t>(k) - 2];
  UnitBallVolume u;
  u.n = n;
  u.omega = omega[static_cast<std::size_t>(n)];
  u.previous = omega[static_cast<std::size_t>(n) - 1];
  u.lower = std::ldexp(u.previous, -(n - 1));
  u.inequality = u.omega >= u.lower;
  return u;
}

} // namespace reiflab
