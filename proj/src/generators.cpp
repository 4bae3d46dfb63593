#include "reiflab/domain.hpp"
#include "reiflab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace reiflab {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

double capsule_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

struct Profile
{
  std::vector<double> amp, freq, phase;

  double operator()(double x) const
  {
    double y = 0;
    for (std::size_t k = 0; k < amp.size(); ++k)
      y += amp[k] * std::sin(freq[k] * x + phase[k]);
    return y;
  }
};

Profile lipschitz_profile(const LipschitzGraphSpec& s)
{
  Rng rng(s.seed);
  Profile p;
  double slope = 0;
  for (int k = 1; k <= s.modes; ++k) {
    const double w = 2 * std::numbers::pi * k / s.wavelength;
    const double a = (0.5 + 0.5 * rng.uniform()) / (k * k);
    p.amp.push_back(a);
    p.freq.push_back(w);
    p.phase.push_back(2 * std::numbers::pi * rng.uniform());
    slope += a * w;
  }
  // Sum of |a_k| w_k bounds the Lipschitz constant.
  for (double& a : p.amp)
    a *= s.lipschitz / slope;
  return p;
}

std::pair<Vec2, Vec2> tentacle_axis(const TentacleSpec& s)
{
  return {Vec2(0, 0), Vec2(s.radius + s.length - s.width / 2, 0)};
}

std::pair<Vec2, Vec2> slit_axis(const SlitSpec& s)
{
  return {Vec2(s.radius - s.depth + s.width / 2, 0), Vec2(s.radius + 2 * s.width, 0)};
}

void validate(const DomainSpec& spec)
{
  auto positive = [](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v))
      throw Error(std::string(what) + " must be positive");
  };
  std::visit(overloaded{
                 [](const HalfspaceSpec& s) {
                   if (!(s.normal.norm() > 0))
                     throw Error("halfspace normal must be nonzero");
                 },
                 [&](const BallSpec& s) { positive(s.radius, "ball radius"); },
                 [&](const RectangleSpec& s) {
                   positive(s.a, "rectangle side a");
                   positive(s.b, "rectangle side b");
                 },
                 [&](const AnnulusSpec& s) {
                   positive(s.radius, "annulus radius");
                   positive(s.thickness, "annulus thickness");
                 },
                 [&](const LipschitzGraphSpec& s) {
                   positive(s.lipschitz, "lipschitz constant");
                   positive(s.wavelength, "wavelength");
                   if (s.modes < 1)
                     throw Error("lipschitz profile needs at least one mode");
                 },
                 [&](const KochFlatSpec& s) {
                   if (!(s.angle_deg > 0 && s.angle_deg < 45))
                     throw Error("koch angle must lie in (0, 45) degrees");
                   if (s.depth < 0 || s.depth > 10)
                     throw Error("koch depth must lie in [0, 10]");
                   positive(s.half_width, "koch half width");
                 },
                 [&](const TentacleSpec& s) {
                   positive(s.width, "tentacle width");
                   positive(s.length, "tentacle length");
                   positive(s.radius, "disk radius");
                   if (!(s.width < s.radius))
                     throw Error("tentacle width must be smaller than the disk radius");
                 },
                 [&](const SlitSpec& s) {
                   positive(s.width, "slit width");
                   positive(s.depth, "slit depth");
                   positive(s.radius, "disk radius");
                   if (!(s.width < s.radius))
                     throw Error("slit width must be smaller than the disk radius");
                 },
                 [&](const DisksSpec& s) {
                   positive(s.radius, "disk radius");
                   if (s.centers.empty())
                     throw Error("disks spec needs at least one center");
                 },
             },
             spec);
}

} // namespace

std::string spec_kind(const DomainSpec& spec)
{
  return std::visit(overloaded{
                        [](const HalfspaceSpec&) { return std::string("halfspace"); },
                        [](const BallSpec&) { return std::string("ball"); },
                        [](const RectangleSpec&) { return std::string("rectangle"); },
                        [](const AnnulusSpec&) { return std::string("annulus"); },
                        [](const LipschitzGraphSpec&) { return std::string("lipschitz_graph"); },
                        [](const KochFlatSpec&) { return std::string("koch_flat"); },
                        [](const TentacleSpec&) { return std::string("disk_with_tentacle"); },
                        [](const SlitSpec&) { return std::string("disk_with_slit"); },
                        [](const DisksSpec&) { return std::string("disks"); },
                    },
                    spec);
}

std::vector<Vec2> koch_arc(const KochFlatSpec& s)
{
  std::vector<Vec2> pts{Vec2(-s.half_width, 0), Vec2(s.half_width, 0)};
  const double th = s.angle_deg * std::numbers::pi / 180;
  const double c = std::cos(th), sn = std::sin(th);
  for (int level = 0; level < s.depth; ++level) {
    std::vector<Vec2> next;
    next.reserve(pts.size() * 4);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const Vec2 p = pts[k], q = pts[k + 1];
      const Vec2 d = q - p;
      const double len = d.norm();
      const Vec2 u = d / len;
      const Vec2 up(-u.y(), u.x());
      const double seg = len / (2 * (1 + c));
      const Vec2 a = p + seg * u;
      next.push_back(p);
      next.push_back(a);
      next.push_back(a + seg * (c * u + sn * up));
      next.push_back(q - seg * u);
    }
    next.push_back(pts.back());
    pts = std::move(next);
  }
  return pts;
}

bool contains(const DomainSpec& spec, const Vec2& p)
{
  return std::visit(
      overloaded{
          [&](const HalfspaceSpec& s) { return s.normal.normalized().dot(p) > s.offset; },
          [&](const BallSpec& s) { return (p - s.center).norm() < s.radius; },
          [&](const RectangleSpec& s) {
            const Vec2 q = (p - s.center).cwiseAbs();
            return q.x() < s.a / 2 && q.y() < s.b / 2;
          },
          [&](const AnnulusSpec& s) {
            const double r = (p - s.center).norm();
            return r > s.radius && r < s.radius + s.thickness;
          },
          [&](const LipschitzGraphSpec& s) { return p.y() > lipschitz_profile(s)(p.x()); },
          [&](const KochFlatSpec& s) {
            // Parity of crossings of the upward vertical ray.
            const auto arc = koch_arc(s);
            if (p.x() < arc.front().x() || p.x() >= arc.back().x())
              return p.y() > 0;
            int crossings = 0;
            for (std::size_t k = 0; k + 1 < arc.size(); ++k) {
              const Vec2 a = arc[k], b = arc[k + 1];
              const bool spans = (a.x() <= p.x() && p.x() < b.x()) || (b.x() <= p.x() && p.x() < a.x());
              if (!spans)
                continue;
              const double y = a.y() + (p.x() - a.x()) * (b.y() - a.y()) / (b.x() - a.x());
              if (y > p.y())
                ++crossings;
            }
            return crossings % 2 == 0;
          },
          [&](const TentacleSpec& s) {
            const auto [a, b] = tentacle_axis(s);
            return p.norm() < s.radius || capsule_distance(p, a, b) < s.width / 2;
          },
          [&](const SlitSpec& s) {
            const auto [a, b] = slit_axis(s);
            return p.norm() < s.radius && capsule_distance(p, a, b) >= s.width / 2;
          },
          [&](const DisksSpec& s) {
            return std::any_of(s.centers.begin(), s.centers.end(),
                               [&](const Vec2& c) { return (p - c).norm() < s.radius; });
          },
      },
      spec);
}

std::optional<double> thinnest_feature(const DomainSpec& spec)
{
  return std::visit(overloaded{
                        [](const AnnulusSpec& s) -> std::optional<double> { return s.thickness; },
                        [](const TentacleSpec& s) -> std::optional<double> { return s.width; },
                        [](const SlitSpec& s) -> std::optional<double> { return s.width; },
                        [](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    spec);
}

std::optional<Box> support(const DomainSpec& spec)
{
  auto disk = [](const Vec2& c, double r) { return Box{c - Vec2(r, r), c + Vec2(r, r)}; };
  return std::visit(
      overloaded{
          [](const HalfspaceSpec&) -> std::optional<Box> { return std::nullopt; },
          [](const LipschitzGraphSpec&) -> std::optional<Box> { return std::nullopt; },
          [](const KochFlatSpec&) -> std::optional<Box> { return std::nullopt; },
          [&](const BallSpec& s) -> std::optional<Box> { return disk(s.center, s.radius); },
          [](const RectangleSpec& s) -> std::optional<Box> {
            return Box{s.center - Vec2(s.a / 2, s.b / 2), s.center + Vec2(s.a / 2, s.b / 2)};
          },
          [&](const AnnulusSpec& s) -> std::optional<Box> { return disk(s.center, s.radius + s.thickness); },
          [](const TentacleSpec& s) -> std::optional<Box> {
            return Box{Vec2(-s.radius, -s.radius), Vec2(s.radius + s.length, s.radius)};
          },
          [&](const SlitSpec& s) -> std::optional<Box> { return disk(Vec2::Zero(), s.radius); },
          [](const DisksSpec& s) -> std::optional<Box> {
            Box b{s.centers.front(), s.centers.front()};
            for (const Vec2& c : s.centers) {
              b.lo = b.lo.cwiseMin(c);
              b.hi = b.hi.cwiseMax(c);
            }
            b.lo.array() -= s.radius;
            b.hi.array() += s.radius;
            return b;
          },
      },
      spec);
}

namespace {

void fill_generic(const DomainSpec& spec, const Box& bbox, double res, OccupancyGrid& g)
{
  for (int j = 0; j < g.height(); ++j)
    for (int i = 0; i < g.width(); ++i)
      if (contains(spec, Vec2(bbox.lo.x() + (i + 0.5) * res, bbox.lo.y() + (j + 0.5) * res)))
        g.set(i, j, true);
}

// Fill column by column from a list of boundary heights: a cell center is
// inside when an even number of boundary crossings lie above it.
void fill_columns(const Box& bbox, double res, OccupancyGrid& g,
                  const std::function<void(double, std::vector<double>&)>& crossings)
{
  std::vector<double> ys;
  for (int i = 0; i < g.width(); ++i) {
    const double x = bbox.lo.x() + (i + 0.5) * res;
    ys.clear();
    crossings(x, ys);
    std::sort(ys.begin(), ys.end());
    for (int j = 0; j < g.height(); ++j) {
      const double y = bbox.lo.y() + (j + 0.5) * res;
      const auto above = ys.end() - std::upper_bound(ys.begin(), ys.end(), y);
      if (above % 2 == 0)
        g.set(i, j, true);
    }
  }
}

} // namespace

Domain rasterize(const DomainSpec& spec, double resolution, const Box& bbox, std::string label)
{
  validate(spec);
  if (!(resolution > 0) || !std::isfinite(resolution))
    throw Error("resolution must be positive");
  if (!(bbox.width() > 0 && bbox.height() > 0))
    throw Error("bbox must have positive extent");
  if (const auto sup = support(spec)) {
    const double mx = 0.05 * bbox.width(), my = 0.05 * bbox.height();
    if (sup->lo.x() - bbox.lo.x() < mx || bbox.hi.x() - sup->hi.x() < mx || sup->lo.y() - bbox.lo.y() < my ||
        bbox.hi.y() - sup->hi.y() < my)
      throw Error("bbox must contain the domain's support with a 5% margin");
  }
  if (const auto f = thinnest_feature(spec); f && resolution > *f)
    throw Error("feature under-resolved");

  const double fw = bbox.width() / resolution, fh = bbox.height() / resolution;
  const int w = static_cast<int>(std::ceil(fw - 1e-9)), h = static_cast<int>(std::ceil(fh - 1e-9));
  if (static_cast<double>(w) * h > 4.0e9)
    throw Error("grid too large");
  Box box = bbox;
  box.hi = box.lo + Vec2(w * resolution, h * resolution);
  if (std::abs(w * resolution - bbox.width()) <= 1e-9 * bbox.width())
    box.hi.x() = bbox.hi.x();
  if (std::abs(h * resolution - bbox.height()) <= 1e-9 * bbox.height())
    box.hi.y() = bbox.hi.y();

  OccupancyGrid g(w, h);
  if (const auto* s = std::get_if<LipschitzGraphSpec>(&spec)) {
    const Profile f = lipschitz_profile(*s);
    fill_columns(box, resolution, g, [&](double x, std::vector<double>& ys) { ys.push_back(f(x)); });
  } else if (const auto* s = std::get_if<KochFlatSpec>(&spec)) {
    const auto arc = koch_arc(*s);
    fill_columns(box, resolution, g, [&](double x, std::vector<double>& ys) {
      if (x < arc.front().x() || x >= arc.back().x()) {
        ys.push_back(0.0);
        return;
      }
      for (std::size_t k = 0; k + 1 < arc.size(); ++k) {
        const Vec2 a = arc[k], b = arc[k + 1];
        if ((a.x() <= x && x < b.x()) || (b.x() <= x && x < a.x()))
          ys.push_back(a.y() + (x - a.x()) * (b.y() - a.y()) / (b.x() - a.x()));
      }
    });
  } else {
    fill_generic(spec, box, resolution, g);
  }
  if (label.empty())
    label = spec_kind(spec);
  return from_occupancy(std::move(label), box, resolution, std::move(g));
}

} // namespace reiflab
