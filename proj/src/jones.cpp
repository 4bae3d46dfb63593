#include "reiflab/jones.hpp"
#include "reiflab/parallel.hpp"
#include "reiflab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace reiflab {

Polyline::Polyline(std::vector<Vec2> vertices)
{
  for (const Vec2& v : vertices)
    push_back(v);
}

void Polyline::push_back(const Vec2& v)
{
  if (!v.allFinite())
    throw Error("non-finite vertex");
  cumulative_.push_back(vertices_.empty() ? 0.0 : cumulative_.back() + (v - vertices_.back()).norm());
  vertices_.push_back(v);
}

void Polyline::append(const Polyline& other)
{
  for (const Vec2& v : other.vertices_)
    push_back(v);
}

Polyline Polyline::reversed() const
{
  return Polyline(std::vector<Vec2>(vertices_.rbegin(), vertices_.rend()));
}

Vec2 Polyline::at(double s) const
{
  if (vertices_.empty())
    throw Error("empty polyline");
  if (s <= 0)
    return vertices_.front();
  if (s >= length())
    return vertices_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
  const double seg = cumulative_[k] - cumulative_[k - 1];
  const double t = seg > 0 ? (s - cumulative_[k - 1]) / seg : 0.0;
  return vertices_[k - 1] + t * (vertices_[k] - vertices_[k - 1]);
}

Vec2 y_point(const Domain& d, const Vec2& x0, double rho, const FlatnessOptions& opts)
{
  const FlatnessSample s = best_hyperplane(d, x0, rho, opts);
  const SeparationResult sep = separation_check(d, s);
  if (!sep.ok())
    throw Error("cannot orient normal");
  return x0 + rho * sep.sample.normal();
}

Chain gamma_chain(const Domain& d, const Vec2& x, double r, std::optional<double> r0, const FlatnessOptions& opts)
{
  Chain c;
  c.r = r;
  c.distance = distance_to_complement(d, x);
  if (c.distance <= 0)
    throw Error("point is not inside the domain");
  if (r < c.distance / 2 || (r0 && r > *r0 / 7 * (1 + 1e-12)))
    throw Error("scale out of range");
  c.x0 = nearest_boundary_point(d, x).point;
  c.curve.push_back(x);
  if (r <= 2 * c.distance) {
    c.short_case = true;
    c.curve.push_back(y_point(d, c.x0, r, opts));
    return c;
  }
  c.k0 = static_cast<int>(std::floor(std::log2(r / c.distance)));
  while (std::ldexp(r, -c.k0) < c.distance)
    --c.k0;
  while (std::ldexp(r, -(c.k0 + 1)) >= c.distance)
    ++c.k0;
  const double floor = 10 * d.resolution();
  while (c.k0 > 0 && std::ldexp(r, -c.k0) < floor) {
    --c.k0;
    c.floor_limited = true;
  }
  for (int k = c.k0; k >= 0; --k)
    c.curve.push_back(y_point(d, c.x0, std::ldexp(r, -k), opts));
  return c;
}

namespace {

// Sample parameters in (0, L) with step min(res, L / 1000).
template <typename F>
std::size_t sample_interior(const Polyline& curve, double res, F&& f)
{
  const double len = curve.length();
  if (len <= 0)
    return 0;
  const double step = std::min(res, len / 1000);
  const auto n = static_cast<std::size_t>(std::ceil(len / step));
  for (std::size_t k = 1; k < n; ++k)
    f(curve.at(len * static_cast<double>(k) / static_cast<double>(n)));
  // Interior vertices are sampled too, so corners are never skipped.
  for (std::size_t k = 1; k + 1 < curve.size(); ++k)
    if (curve.arc_length(k) > 0 && curve.arc_length(k) < len)
      f(curve.vertices()[k]);
  return n > 0 ? n - 1 : 0;
}

} // namespace

ChainCheck verify_chain(const Domain& d, const Chain& chain)
{
  ChainCheck out;
  const Vec2 x = chain.curve.front();
  out.length = chain.curve.length();
  out.length_bound = 4 * chain.r;
  out.slack = 2 * d.resolution();
  out.length_ok = out.length <= out.length_bound + 4 * d.resolution();
  out.worst_ratio = std::numeric_limits<double>::infinity();
  bool ok = true;
  out.n_samples = sample_interior(chain.curve, d.resolution(), [&](const Vec2& z) {
    const double dz = distance_to_complement(d, z);
    const double dzx = (z - x).norm();
    if (dz <= 0)
      out.escaped = true;
    if (dzx <= 0)
      return;
    if (dz / dzx < out.worst_ratio) {
      out.worst_ratio = dz / dzx;
      out.worst_z = z;
    }
    if (dz < kChainCigarConstant * dzx - out.slack)
      ok = false;
  });
  out.cigar_ok = ok && !out.escaped;
  return out;
}

Polyline jones_curve(const Domain& d, const Vec2& x, const Vec2& y, double r0, const FlatnessOptions& opts)
{
  const double r = (x - y).norm();
  if (r <= 0)
    throw Error("endpoints coincide");
  if (r > r0 / 7 * (1 + 1e-12))
    throw Error("beyond Jones radius");
  const double dx = distance_to_complement(d, x);
  const double dy = distance_to_complement(d, y);
  if (dx <= 0 || dy <= 0)
    throw Error("point is not inside the domain");
  if (dx >= 2 * r || dy >= 2 * r)
    return Polyline({x, y});
  Polyline out = gamma_chain(d, x, r, r0, opts).curve;
  out.append(gamma_chain(d, y, r, r0, opts).curve.reversed());
  return out;
}

CigarReport verify_curve(const Domain& d, const Polyline& curve, const Vec2& x, const Vec2& y, double delta)
{
  if (!(delta > 0))
    throw Error("delta must be positive");
  if (curve.size() == 0)
    throw Error("empty polyline");
  const double dxy = (x - y).norm();
  if (dxy <= 0)
    throw Error("endpoints coincide");
  const double tol = 1e-12 * std::max(1.0, dxy);
  if ((curve.front() - x).norm() > tol || (curve.back() - y).norm() > tol)
    throw Error("curve endpoints do not match");
  CigarReport rep;
  rep.curve = curve;
  rep.x = x;
  rep.y = y;
  rep.delta = delta;
  rep.slack = 2 * d.resolution();
  rep.margin = 4 * d.resolution() / dxy;
  rep.length_ratio = curve.length() / dxy;
  rep.worst_delta = std::numeric_limits<double>::infinity();
  rep.worst_delta_slack = std::numeric_limits<double>::infinity();
  rep.n_samples = sample_interior(curve, d.resolution(), [&](const Vec2& z) {
    const double denom = (z - x).norm() * (z - y).norm();
    if (denom <= 0)
      return;
    const double dz = distance_to_complement(d, z);
    if (dz <= 0)
      rep.escaped = true;
    const double q = dz * dxy / denom;
    if (q < rep.worst_delta) {
      rep.worst_delta = q;
      rep.worst_z = z;
    }
    rep.worst_delta_slack = std::min(rep.worst_delta_slack, (dz + rep.slack) * dxy / denom);
  });
  rep.pass = !rep.escaped && rep.length_ratio <= 1 / delta + rep.margin && rep.worst_delta_slack >= delta;
  return rep;
}

double segment_cigar_max(const Vec2& x, const Vec2& y, double step)
{
  const Polyline seg({x, y});
  const double dxy = seg.length();
  if (dxy <= 0)
    throw Error("endpoints coincide");
  if (!(step > 0))
    throw Error("step must be positive");
  double best = 0;
  auto n = static_cast<std::size_t>(std::ceil(dxy / step));
  n += n % 2; // keep the midpoint among the samples
  for (std::size_t k = 0; k <= n; ++k) {
    const Vec2 z = seg.at(dxy * static_cast<double>(k) / static_cast<double>(n));
    best = std::max(best, (z - x).norm() * (z - y).norm() / dxy);
  }
  return best;
}

JonesConstant empirical_jones_constant(const Domain& d, double R0, std::size_t n_pairs, std::uint64_t seed,
                                       double r0, const FlatnessOptions& opts)
{
  if (n_pairs < 1)
    throw Error("n_pairs must be at least 1");
  const double floor = 10 * d.resolution();
  if (!(R0 >= floor))
    throw Error("R0 must be at least 10 cells");
  const Box& box = d.bbox();
  const Vec2 lo = box.lo + Vec2::Constant(4 * R0), hi = box.hi - Vec2::Constant(4 * R0);
  if (!(lo.x() < hi.x() && lo.y() < hi.y()))
    throw Error("box too small for R0");

  JonesConstant out;
  out.seed = seed;
  out.R0 = R0;
  out.pairs.resize(n_pairs);
  parallel_for(n_pairs, resolve_jobs(opts.jobs), [&](std::size_t p) {
    Rng rng = Rng::stream(seed, p);
    Vec2 x, y;
    bool found = false;
    for (int draw = 0; draw < 1000000 && !found; ++draw) {
      x = Vec2(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
      const double rho = R0 * std::sqrt(rng.uniform());
      const double th = 2 * std::numbers::pi * rng.uniform();
      y = x + rho * Vec2(std::cos(th), std::sin(th));
      found = rho >= floor && distance_to_complement(d, x) > 0 && distance_to_complement(d, y) > 0;
    }
    if (!found)
      throw Error("rejection sampling failed");
    const Polyline curve = jones_curve(d, x, y, r0, opts);
    const CigarReport rep = verify_curve(d, curve, x, y, kJonesDelta);
    JonesPair& jp = out.pairs[p];
    jp.x = x;
    jp.y = y;
    jp.distance = (x - y).norm();
    jp.length_ratio = rep.length_ratio;
    jp.worst_delta = rep.worst_delta;
    jp.worst_delta_slack = rep.worst_delta_slack;
    jp.margin = rep.margin;
    jp.escaped = rep.escaped;
    jp.delta_value = rep.escaped ? 0.0 : std::min(rep.worst_delta_slack, 1 / rep.length_ratio);
    jp.segment = curve.size() == 2;
    jp.pass = !rep.escaped && rep.length_ratio <= kJonesLengthFactor + rep.margin && rep.worst_delta_slack >= kJonesDelta;
  });

  out.delta_star = std::numeric_limits<double>::infinity();
  out.min_worst_delta = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const JonesPair& jp = out.pairs[p];
    if (jp.delta_value < out.delta_star) {
      out.delta_star = jp.delta_value;
      out.worst = p;
    }
    out.max_length_ratio = std::max(out.max_length_ratio, jp.length_ratio);
    out.min_worst_delta = std::min(out.min_worst_delta, jp.worst_delta);
  }
  return out;
}

} // namespace reiflab
