#include "reiflab/flatness.hpp"
#include "reiflab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace reiflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Boundary samples of B(x, r) in coordinates relative to x, plus the region
// in which samples can exist at all (the hull of the cell centers).
struct Slice
{
  std::vector<double> dx, dy;
  Vec2 clip_lo, clip_hi;
  double r = 0;
};

Slice gather(const Domain& d, const Vec2& x, double r)
{
  thread_local std::vector<Eigen::Index> idx;
  d.boundary_index().within(x, r, idx);
  if (idx.empty())
    throw Error("empty slice");
  Slice s;
  s.r = r;
  s.dx.reserve(idx.size());
  s.dy.reserve(idx.size());
  const PointSet& b = d.boundary();
  for (Eigen::Index k : idx) {
    s.dx.push_back(b(0, k) - x.x());
    s.dy.push_back(b(1, k) - x.y());
  }
  const double h = d.resolution();
  s.clip_lo = d.bbox().lo + Vec2(h / 2, h / 2) - x;
  s.clip_hi = d.bbox().hi - Vec2(h / 2, h / 2) - x;
  return s;
}

// Parameter interval of the chord {t u : |t| <= r} inside the clip box.
std::pair<double, double> chord(const Slice& s, double ux, double uy)
{
  double lo = -s.r, hi = s.r;
  auto axis = [&](double u, double clo, double chi) {
    if (u > 0) {
      lo = std::max(lo, clo / u);
      hi = std::min(hi, chi / u);
    } else if (u < 0) {
      lo = std::max(lo, chi / u);
      hi = std::min(hi, clo / u);
    }
  };
  axis(ux, s.clip_lo.x(), s.clip_hi.x());
  axis(uy, s.clip_lo.y(), s.clip_hi.y());
  if (hi < lo)
    hi = lo = 0;
  return {lo, hi};
}

// Squared sup distance from the samples to the chord.
double samples_to_chord2(const Slice& s, double ux, double uy, double lo, double hi)
{
  double worst = 0;
  const std::size_t m = s.dx.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double t = s.dx[k] * ux + s.dy[k] * uy;
    const double n = -s.dx[k] * uy + s.dy[k] * ux;
    const double tc = std::clamp(t, lo, hi);
    worst = std::max(worst, (t - tc) * (t - tc) + n * n);
  }
  return worst;
}

// Squared sup over the chord of the distance to the nearest sample: the
// maximum of the lower envelope of the parabolas (t - t_k)^2 + n_k^2.
double chord_to_samples2(const Slice& s, double ux, double uy, double lo, double hi)
{
  thread_local std::vector<std::pair<double, double>> tn;
  thread_local std::vector<std::size_t> v;
  thread_local std::vector<double> z;
  const std::size_t m = s.dx.size();
  tn.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = s.dx[k] * ux + s.dy[k] * uy;
    const double n = -s.dx[k] * uy + s.dy[k] * ux;
    tn[k] = {t, n * n};
  }
  std::sort(tn.begin(), tn.end());
  // Equal abscissae: the lowest parabola dominates.
  std::size_t u = 0;
  for (std::size_t k = 1; k < m; ++k) {
    if (tn[k].first == tn[u].first)
      continue;
    tn[++u] = tn[k];
  }
  const std::size_t n = u + 1;
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t top = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  auto meet = [&](std::size_t p, std::size_t q) {
    const auto [tp, hp] = tn[p];
    const auto [tq, hq] = tn[q];
    return ((hq + tq * tq) - (hp + tp * tp)) / (2 * (tq - tp));
  };
  for (std::size_t q = 1; q < n; ++q) {
    double sct = meet(v[top], q);
    while (top > 0 && sct <= z[top]) {
      --top;
      sct = meet(v[top], q);
    }
    ++top;
    v[top] = q;
    z[top] = sct;
    z[top + 1] = kInf;
  }
  double worst = 0;
  for (std::size_t k = 0; k <= top; ++k) {
    const double a = std::max(z[k], lo), b = std::min(z[k + 1], hi);
    if (a > b)
      continue;
    const auto [tk, hk] = tn[v[k]];
    worst = std::max({worst, (a - tk) * (a - tk) + hk, (b - tk) * (b - tk) + hk});
  }
  return worst;
}

double deviation(const Slice& s, double phi)
{
  const double ux = std::cos(phi), uy = std::sin(phi);
  const auto [lo, hi] = chord(s, ux, uy);
  return std::sqrt(std::max(samples_to_chord2(s, ux, uy, lo, hi), chord_to_samples2(s, ux, uy, lo, hi)));
}

void check_scale(const Domain& d, double r)
{
  if (!(r > 0) || !std::isfinite(r))
    throw Error("scale must be positive");
  if (r < 10 * d.resolution() * (1 - 1e-12))
    throw Error("scale under-resolved: r must be at least 10 cells");
}

void check_on_boundary(const Domain& d, const Vec2& x)
{
  const auto nb = nearest_boundary_point(d, x);
  if (nb.distance > d.resolution() * std::sqrt(2.0) * (1 + 1e-9))
    throw Error("point is not on the boundary");
}

Hyperplane line_through(const Vec2& x, double phi)
{
  Point n(2);
  n << -std::sin(phi), std::cos(phi);
  return Hyperplane(Point(x), n);
}

} // namespace

double line_deviation(const Domain& d, const Vec2& x, double r, const Vec2& normal)
{
  check_scale(d, r);
  if (std::abs(normal.norm() - 1) > 1e-9)
    throw Error("not normalized");
  const Slice s = gather(d, x, r);
  const double phi = std::atan2(-normal.x(), normal.y());
  return deviation(s, phi) / r;
}

FlatnessSample best_hyperplane(const Domain& d, const Vec2& x, double r, const FlatnessOptions& opts)
{
  check_scale(d, r);
  check_on_boundary(d, x);
  const Slice s = gather(d, x, r);
  const int na = std::max(opts.coarse_angles, 8);
  const double step = std::numbers::pi / na;

  thread_local std::vector<double> a2;
  thread_local std::vector<int> order;
  a2.resize(static_cast<std::size_t>(na));
  for (int m = 0; m < na; ++m) {
    const double phi = m * step, ux = std::cos(phi), uy = std::sin(phi);
    const auto [lo, hi] = chord(s, ux, uy);
    a2[static_cast<std::size_t>(m)] = samples_to_chord2(s, ux, uy, lo, hi);
  }
  order.resize(static_cast<std::size_t>(na));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int p, int q) {
    return a2[static_cast<std::size_t>(p)] < a2[static_cast<std::size_t>(q)];
  });

  // The full objective dominates the one-sided term, so angles whose
  // one-sided term already exceeds the incumbent cannot win.
  double best = kInf, best_phi = 0;
  for (int m : order) {
    const double one_sided = a2[static_cast<std::size_t>(m)];
    if (one_sided >= best * best)
      break;
    const double f = deviation(s, m * step);
    if (f < best) {
      best = f;
      best_phi = m * step;
    }
  }

  // Golden-section refinement within one coarse step on either side.
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = best_phi - step, b = best_phi + step;
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = deviation(s, c), fe = deviation(s, e);
  while (b - a > opts.refine_tolerance) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = deviation(s, c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = deviation(s, e);
    }
  }
  if (fc < best) {
    best = fc;
    best_phi = c;
  }
  if (fe < best) {
    best = fe;
    best_phi = e;
  }

  FlatnessSample out;
  out.x = x;
  out.r = r;
  out.plane = line_through(x, best_phi);
  out.epsilon = best / r;
  return out;
}

std::string to_string(SeparationStatus s)
{
  switch (s) {
  case SeparationStatus::Separated:
    return "separated";
  case SeparationStatus::Violation:
    return "violation";
  case SeparationStatus::Degenerate:
    return "degenerate slab";
  }
  return "unknown";
}

SeparationResult separation_check(const Domain& d, const FlatnessSample& s, std::optional<double> slab_epsilon)
{
  SeparationResult res;
  res.sample = s;
  res.slab_epsilon = slab_epsilon.value_or(s.epsilon);
  const double h = d.resolution();
  const Vec2 x = s.x;
  const Vec2 n = s.plane.normal;
  const double reach = s.r - h;            // eroded ball radius
  const double tau = 2 * res.slab_epsilon * s.r + h; // eroded slab half-width
  if (reach <= 0 || tau >= reach) {
    res.status = SeparationStatus::Degenerate;
    return res;
  }
  const Box& box = d.bbox();

  struct Run
  {
    int j, i0, i1;
    bool plus;
  };
  std::vector<Run> runs;
  auto in_cap = [&](int i, int j, bool plus) {
    const Vec2 c = d.cell_center(i, j) - x;
    if (c.squaredNorm() >= reach * reach)
      return false;
    const double sd = n.dot(c);
    return plus ? sd > tau : sd < -tau;
  };

  const int j0 = std::max(0, static_cast<int>(std::floor((x.y() - reach - box.lo.y()) / h)) - 1);
  const int j1 = std::min(d.height() - 1, static_cast<int>(std::ceil((x.y() + reach - box.lo.y()) / h)) + 1);
  for (int j = j0; j <= j1; ++j) {
    const double dy = box.lo.y() + (j + 0.5) * h - x.y();
    const double half2 = reach * reach - dy * dy;
    if (half2 <= 0)
      continue;
    const double half = std::sqrt(half2);
    for (bool plus : {true, false}) {
      // Offsets u = cx - x.x with |u| < half and +-(n.x u + n.y dy) > tau.
      double lo = -half, hi = half;
      const double sign = plus ? 1.0 : -1.0;
      const double nx = sign * n.x(), rest = tau - sign * n.y() * dy;
      if (std::abs(nx) < 1e-15) {
        if (!(0 > rest))
          continue;
      } else if (nx > 0) {
        lo = std::max(lo, rest / nx);
      } else {
        hi = std::min(hi, rest / nx);
      }
      if (lo > hi)
        continue;
      int i0 = static_cast<int>(std::floor((x.x() + lo - box.lo.x()) / h - 0.5));
      int i1 = static_cast<int>(std::ceil((x.x() + hi - box.lo.x()) / h - 0.5));
      i0 = std::max(i0 - 1, 0);
      i1 = std::min(i1 + 1, d.width() - 1);
      while (i0 <= i1 && !in_cap(i0, j, plus))
        ++i0;
      while (i1 >= i0 && !in_cap(i1, j, plus))
        --i1;
      if (i0 > i1)
        continue;
      runs.push_back({j, i0, i1 + 1, plus});
      const std::size_t cells = static_cast<std::size_t>(i1 + 1 - i0);
      const std::size_t in = d.occupancy().count_row(j, i0, i1 + 1);
      if (plus) {
        res.plus_cells += cells;
        res.plus_inside += in;
      } else {
        res.minus_cells += cells;
        res.minus_inside += in;
      }
    }
  }

  if (res.plus_cells == 0 || res.minus_cells == 0) {
    res.status = SeparationStatus::Degenerate;
    return res;
  }
  const bool plus_in = res.plus_inside == res.plus_cells && res.minus_inside == 0;
  const bool minus_in = res.plus_inside == 0 && res.minus_inside == res.minus_cells;
  if (plus_in || minus_in) {
    res.status = SeparationStatus::Separated;
    res.sample.orientation = plus_in ? 1 : -1;
    if (minus_in)
      res.sample.plane = s.plane.flipped();
    return res;
  }

  res.status = SeparationStatus::Violation;
  const double plus_frac = static_cast<double>(res.plus_inside) / static_cast<double>(res.plus_cells);
  const double minus_frac = static_cast<double>(res.minus_inside) / static_cast<double>(res.minus_cells);
  const bool expect_plus_inside = plus_frac >= minus_frac;
  for (const Run& run : runs) {
    const bool expected = run.plus == expect_plus_inside;
    if (const auto i = d.occupancy().first_mismatch(run.j, run.i0, run.i1, expected)) {
      res.witness = Cell{*i, run.j};
      res.witness_point = d.cell_center(*i, run.j);
      break;
    }
  }
  return res;
}

std::vector<double> scale_grid(const Domain& d, double r0, int n_scales)
{
  if (n_scales < 1)
    throw Error("n_scales must be at least 1");
  if (!(r0 > 0))
    throw Error("r0 must be positive");
  std::vector<double> out;
  const double floor = 10 * d.resolution() * (1 - 1e-12);
  for (int k = 0; k < n_scales; ++k) {
    const double r = std::ldexp(r0, -k);
    if (r < floor)
      break;
    out.push_back(r);
  }
  if (out.empty())
    throw Error("scale under-resolved: r0 must be at least 10 cells");
  return out;
}

std::vector<Eigen::Index> stratified_boundary_subset(const Domain& d, std::size_t max_points)
{
  const PointSet& b = d.boundary();
  const auto count = static_cast<std::size_t>(b.cols());
  std::vector<Eigen::Index> all(count);
  std::iota(all.begin(), all.end(), Eigen::Index(0));
  if (count <= max_points)
    return all;
  // One sample per occupied bucket of a square grid, shrinking the spacing
  // until at least max_points buckets are occupied.
  double spacing = 2 * d.resolution() * static_cast<double>(count) / static_cast<double>(max_points);
  for (;;) {
    std::vector<Eigen::Index> picked;
    std::vector<std::pair<long long, long long>> keys;
    std::vector<std::pair<std::pair<long long, long long>, Eigen::Index>> tagged;
    tagged.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      const long long bx = static_cast<long long>(std::floor((b(0, col) - d.bbox().lo.x()) / spacing));
      const long long by = static_cast<long long>(std::floor((b(1, col) - d.bbox().lo.y()) / spacing));
      tagged.push_back({{by, bx}, col});
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& p, const auto& q) { return p.first < q.first; });
    for (std::size_t k = 0; k < tagged.size(); ++k)
      if (k == 0 || tagged[k].first != tagged[k - 1].first)
        picked.push_back(tagged[k].second);
    if (picked.size() >= max_points) {
      std::sort(picked.begin(), picked.end());
      return picked;
    }
    spacing /= 1.1;
  }
}

double FlatnessReport::margin() const
{
  return scales.empty() ? kInf : 2 * resolution / r_min();
}

FlatnessReport flatness_profile(const Domain& d, double r0, int n_scales, const FlatnessOptions& opts,
                                std::optional<double> slab_epsilon)
{
  if (d.boundary().cols() == 0)
    throw Error("no boundary");
  FlatnessReport rep;
  rep.r0 = r0;
  rep.resolution = d.resolution();
  rep.scales = scale_grid(d, r0, n_scales);
  rep.boundary_count = static_cast<std::size_t>(d.boundary().cols());
  rep.slab_epsilon = slab_epsilon.value_or(-1);
  const auto points = stratified_boundary_subset(d, std::max<std::size_t>(opts.max_points, 500));
  rep.subsampled = points.size() < rep.boundary_count;
  rep.evaluated_points = points.size();

  const std::size_t ns = rep.scales.size();
  rep.entries.resize(points.size() * ns);
  parallel_for(rep.entries.size(), resolve_jobs(opts.jobs), [&](std::size_t item) {
    const std::size_t p = item / ns, k = item % ns;
    const Vec2 x = d.boundary().col(points[p]);
    ProfileEntry& e = rep.entries[item];
    e.sample = best_hyperplane(d, x, rep.scales[k], opts);
    const SeparationResult sep = separation_check(d, e.sample, slab_epsilon);
    e.separation = sep.status;
    e.witness = sep.witness;
    if (sep.ok())
      e.sample = sep.sample;
  });

  rep.per_scale.resize(ns);
  for (std::size_t k = 0; k < ns; ++k)
    rep.per_scale[k].r = rep.scales[k];
  rep.sup_epsilon = -1;
  for (std::size_t item = 0; item < rep.entries.size(); ++item) {
    const ProfileEntry& e = rep.entries[item];
    ScaleSummary& sc = rep.per_scale[item % ns];
    sc.sup_epsilon = std::max(sc.sup_epsilon, e.sample.epsilon);
    if (e.separation != SeparationStatus::Separated)
      ++sc.separation_failures;
    if (e.sample.epsilon > rep.sup_epsilon) {
      rep.sup_epsilon = e.sample.epsilon;
      rep.worst_x = e.sample.x;
      rep.worst_r = e.sample.r;
    }
  }
  rep.separation_ok = rep.per_scale.front().separation_failures == 0;
  rep.separation_all_scales = std::all_of(rep.per_scale.begin(), rep.per_scale.end(),
                                          [](const ScaleSummary& s) { return s.separation_failures == 0; });
  return rep;
}

Certificate certify(const Domain& d, double eps, double r0, int n_scales, const FlatnessOptions& opts)
{
  if (!(eps > 0 && eps < 0.5))
    throw Error("eps must lie in (0, 1/2)");
  Certificate c;
  c.eps = eps;
  c.r0 = r0;
  c.report = flatness_profile(d, r0, n_scales, opts, eps);
  c.r_min = c.report.r_min();
  c.sup_epsilon = c.report.sup_epsilon;
  c.margin = c.report.margin();
  c.flat = c.sup_epsilon + c.margin <= eps;
  c.separation_r0 = c.report.separation_ok;
  c.separation_all = c.report.separation_all_scales;
  c.certified = c.flat && c.separation_r0;
  if (!c.flat)
    c.reason = "flatness: sup epsilon " + std::to_string(c.sup_epsilon) + " + margin " + std::to_string(c.margin) +
               " exceeds eps " + std::to_string(eps);
  else if (!c.separation_r0)
    c.reason = "separation fails at r0";
  return c;
}

AngleCheck normal_angle_check(const Domain& d, const Vec2& x, double r, double M, double eps,
                              const FlatnessOptions& opts)
{
  if (!(M >= 1))
    throw Error("M must be at least 1");
  AngleCheck a;
  a.fine = best_hyperplane(d, x, r, opts);
  a.coarse = best_hyperplane(d, x, M * r, opts);
  a.cosine = std::abs(angle_cosine(a.fine.plane.normal, a.coarse.plane.normal));
  a.bound = 1 - (M + 1) * eps;
  a.margin = 2 * d.resolution() / r;
  a.pass = a.cosine >= a.bound - a.margin;
  return a;
}

PropagationReport separation_propagation_check(const Domain& d, double r0, double eps, const FlatnessOptions& opts)
{
  if (!(eps > 0 && eps < 0.5))
    throw Error("eps must lie in (0, 1/2)");
  PropagationReport rep;
  rep.eps = eps;
  rep.r0 = r0;
  rep.admissible_step = (1 - eps) / (3 * eps);
  const std::vector<double> scales = scale_grid(d, r0, 64);
  const FlatnessReport prof = flatness_profile(d, r0, static_cast<int>(scales.size()), opts, eps);
  const std::size_t ns = prof.scales.size();
  rep.scales.resize(ns);
  for (std::size_t k = 0; k < ns; ++k)
    rep.scales[k].r = prof.scales[k];
  for (std::size_t item = 0; item < prof.entries.size(); ++item) {
    PropagationScale& s = rep.scales[item % ns];
    ++s.evaluated;
    if (prof.entries[item].separation != SeparationStatus::Separated) {
      if (!s.witness_x)
        s.witness_x = prof.entries[item].sample.x;
      ++s.failures;
    }
  }
  rep.pass = true;
  for (PropagationScale& s : rep.scales) {
    s.pass = s.failures == 0;
    rep.pass = rep.pass && s.pass;
  }
  return rep;
}

} // namespace reiflab
