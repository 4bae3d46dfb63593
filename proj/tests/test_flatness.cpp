#include <doctest.h>

#include "oracles.hpp"
#include "reiflab/flatness.hpp"
#include "reiflab/rng.hpp"

#include <cmath>
#include <numbers>

using namespace reiflab;

namespace {

Box box(double x0, double y0, double x1, double y1) { return {Vec2(x0, y0), Vec2(x1, y1)}; }

const Domain& halfspace()
{
  static const Domain d = rasterize(HalfspaceSpec{}, 0.005, box(-1, -1, 1, 1), "halfspace");
  return d;
}

const Domain& unit_ball()
{
  static const Domain d = rasterize(BallSpec{Vec2::Zero(), 1}, 0.002, box(-1.2, -1.2, 1.2, 1.2), "ball");
  return d;
}

Vec2 on_boundary(const Domain& d, const Vec2& p) { return nearest_boundary_point(d, p).point; }

} // namespace

TEST_CASE("best hyperplane on a halfspace")
{
  const Domain& d = halfspace();
  for (const double x : {-0.4025, 0.0025, 0.3175}) {
    const FlatnessSample s = best_hyperplane(d, Vec2(x, 0), 0.5);
    CHECK(s.epsilon <= 2 * d.resolution() / 0.5);
    CHECK(std::abs(s.normal().y()) == doctest::Approx(1).epsilon(1e-6));
    CHECK((s.plane.base - Vec2(x, 0)).norm() == 0);
  }
}

TEST_CASE("best hyperplane on the unit circle matches the angle-grid oracle")
{
  const Domain& d = unit_ball();
  const Vec2 x = on_boundary(d, Vec2(1, 0));
  const FlatnessSample s = best_hyperplane(d, x, 0.1);
  CHECK(s.epsilon == doctest::Approx(0.05).epsilon(0.2));
  const oracle::AngleMin ref = oracle::best_line(d, x, 0.1, 3600, 4000);
  CHECK(std::abs(s.epsilon - ref.epsilon) <= 0.02 * ref.epsilon);
  CHECK(std::abs(s.normal().x()) > 0.99);
}

TEST_CASE("best hyperplane at a right-angle corner")
{
  const Domain d = rasterize(RectangleSpec{1, 1, Vec2::Zero()}, 0.005, box(-1, -1, 1, 1));
  const Vec2 x = on_boundary(d, Vec2(0.5, 0.5));
  const FlatnessSample s = best_hyperplane(d, x, 0.2);
  CHECK(s.epsilon == doctest::Approx(std::sin(std::numbers::pi / 4)).epsilon(0.1));
}

TEST_CASE("best hyperplane preconditions")
{
  const Domain& d = halfspace();
  CHECK_THROWS_WITH(best_hyperplane(d, Vec2(0.0025, 0.3), 0.5), "point is not on the boundary");
  CHECK_THROWS_WITH(best_hyperplane(d, Vec2(0.0025, 0), 0.04), "scale under-resolved: r must be at least 10 cells");
}

TEST_CASE("optimizer dominates random candidate lines")
{
  const Domain d = rasterize(KochFlatSpec{10, 3, 1}, 0.004, box(-1.5, -1, 1.5, 1));
  Rng rng(17);
  for (int k = 0; k < 10; ++k) {
    const Vec2 x = on_boundary(d, Vec2(rng.uniform(-0.8, 0.8), 0.05));
    const double r = rng.uniform(0.1, 0.4);
    const FlatnessSample s = best_hyperplane(d, x, r);
    for (int c = 0; c < 10; ++c) {
      const double phi = rng.uniform(0, 2 * std::numbers::pi);
      CHECK(s.epsilon <= line_deviation(d, x, r, Vec2(std::cos(phi), std::sin(phi))) + 1e-12);
    }
  }
}

TEST_CASE("separation on flat and round boundaries")
{
  SUBCASE("halfspace: normal points into y > 0")
  {
    const Domain& d = halfspace();
    const SeparationResult sep = separation_check(d, best_hyperplane(d, Vec2(0.0025, 0), 0.5));
    CHECK(sep.status == SeparationStatus::Separated);
    CHECK(sep.sample.normal().y() == doctest::Approx(1).epsilon(1e-6));
    CHECK(sep.sample.orientation != 0);
  }
  SUBCASE("ball: inside cap faces the center")
  {
    const Domain& d = unit_ball();
    const FlatnessSample s = best_hyperplane(d, on_boundary(d, Vec2(1, 0)), 0.1);
    const SeparationResult sep = separation_check(d, s, 0.06);
    CHECK(sep.ok());
    CHECK(sep.sample.normal().x() < -0.99);
    CHECK(sep.plus_inside == sep.plus_cells);
    CHECK(sep.minus_inside == 0);
  }
  SUBCASE("plane minus a thin ring: both sides inside")
  {
    const Domain ring = rasterize(AnnulusSpec{1, 0.01, Vec2::Zero()}, 0.002, box(-1.3, -1.3, 1.3, 1.3));
    const Domain d = complement(ring);
    const FlatnessSample s = best_hyperplane(d, on_boundary(d, Vec2(1.01, 0)), 0.2);
    const SeparationResult sep = separation_check(d, s, 0.06);
    CHECK(sep.status == SeparationStatus::Violation);
    REQUIRE(sep.witness.has_value());
    CHECK(d.inside(sep.witness->i, sep.witness->j));
  }
  SUBCASE("slab wider than the ball is degenerate")
  {
    const Domain& d = halfspace();
    const SeparationResult sep = separation_check(d, best_hyperplane(d, Vec2(0.0025, 0), 0.5), 0.499);
    CHECK(sep.status == SeparationStatus::Degenerate);
    CHECK(to_string(sep.status) == "degenerate slab");
  }
}

TEST_CASE("scale grid")
{
  const Domain& d = halfspace();
  const std::vector<double> g = scale_grid(d, 0.4, 5);
  REQUIRE(g.size() == 4);
  CHECK(g.front() == 0.4);
  CHECK(g.back() == doctest::Approx(0.05));
  for (double r : g) {
    CHECK(r > 0);
    CHECK(r <= 0.4);
    CHECK(r >= 10 * d.resolution());
  }
  CHECK_THROWS(scale_grid(d, 0.4, 0));
  CHECK_THROWS(scale_grid(d, 0.01, 1));
}

TEST_CASE("flatness profile")
{
  SUBCASE("halfspace")
  {
    const FlatnessReport rep = flatness_profile(halfspace(), 0.4, 2);
    CHECK(rep.sup_epsilon <= 2 * 0.005 / 0.2);
    CHECK(rep.separation_ok);
    CHECK(rep.separation_all_scales);
    CHECK_FALSE(rep.subsampled);
    CHECK(rep.margin() == doctest::Approx(2 * 0.005 / 0.2));
  }
  SUBCASE("ball: sup attained at r0")
  {
    FlatnessOptions opts;
    opts.max_points = 500;
    const FlatnessReport rep = flatness_profile(unit_ball(), 0.1, 2, opts);
    CHECK(rep.subsampled);
    CHECK(rep.evaluated_points >= 500);
    CHECK(rep.sup_epsilon == doctest::Approx(0.05).epsilon(0.2));
    CHECK(rep.worst_r == 0.1);
    double mx = 0;
    for (const ProfileEntry& e : rep.entries)
      mx = std::max(mx, e.sample.epsilon);
    CHECK(rep.sup_epsilon == mx);
  }
  SUBCASE("slit: violation or large epsilon near the mouth")
  {
    FlatnessOptions opts;
    opts.max_points = 500;
    const Domain d = rasterize(SlitSpec{0.05, 1, 1}, 0.005, box(-1.2, -1.2, 1.2, 1.2));
    const FlatnessReport rep = flatness_profile(d, 0.5, 1, opts);
    CHECK((!rep.separation_ok || rep.sup_epsilon > 0.5));
  }
}

TEST_CASE("profile does not depend on the worker count")
{
  FlatnessOptions one, many;
  one.jobs = 1;
  many.jobs = 3;
  one.max_points = many.max_points = 600;
  const Domain d = rasterize(KochFlatSpec{8, 3, 1}, 0.004, box(-1.5, -1, 1.5, 1));
  const FlatnessReport a = flatness_profile(d, 0.3, 2, one);
  const FlatnessReport b = flatness_profile(d, 0.3, 2, many);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    CHECK(a.entries[k].sample.epsilon == b.entries[k].sample.epsilon);
    CHECK(a.entries[k].separation == b.entries[k].separation);
  }
  CHECK(a.sup_epsilon == b.sup_epsilon);
}

TEST_CASE("stratified subset")
{
  const Domain& d = unit_ball();
  const auto all = stratified_boundary_subset(d, static_cast<std::size_t>(d.boundary().cols()));
  CHECK(all.size() == static_cast<std::size_t>(d.boundary().cols()));
  const auto some = stratified_boundary_subset(d, 500);
  CHECK(some.size() >= 500);
  CHECK(some.size() < all.size());
  CHECK(some.size() <= 750);
  CHECK(some == stratified_boundary_subset(d, 500));
}

TEST_CASE("certification")
{
  const Domain& hs = halfspace();
  const Certificate c = certify(hs, 0.1, 0.2);
  CHECK(c.certified);
  CHECK(c.flat);
  CHECK(c.separation_r0);
  CHECK(c.margin == doctest::Approx(2 * 0.005 / 0.2));

  const Certificate tight = certify(hs, 0.02, 0.2);
  CHECK_FALSE(tight.certified);
  CHECK_FALSE(tight.reason.empty());

  CHECK_THROWS_WITH(certify(hs, 0.5, 0.2), "eps must lie in (0, 1/2)");
  CHECK_THROWS_WITH(certify(hs, 0, 0.2), "eps must lie in (0, 1/2)");
}

TEST_CASE("certification is monotone in eps and symmetric under complement")
{
  FlatnessOptions opts;
  opts.max_points = 500;
  const Domain d = rasterize(BallSpec{Vec2::Zero(), 1}, 0.005, box(-1.2, -1.2, 1.2, 1.2));
  const Domain c = complement(d);
  bool seen = false;
  for (const double eps : {0.05, 0.08, 0.1, 0.12, 0.15, 0.2, 0.3, 0.45}) {
    const bool ok = certify(d, eps, 0.2, 1, opts).certified;
    if (seen)
      CHECK(ok);
    seen = seen || ok;
    CHECK(certify(c, eps, 0.2, 1, opts).certified == ok);
  }
  CHECK(seen);
}

TEST_CASE("normal angle check")
{
  SUBCASE("halfspace")
  {
    const AngleCheck a = normal_angle_check(halfspace(), Vec2(0.0025, 0), 0.1, 4, 0.05);
    CHECK(a.cosine == doctest::Approx(1));
    CHECK(a.bound == doctest::Approx(0.75));
    CHECK(a.pass);
  }
  SUBCASE("unit circle")
  {
    const Domain d = rasterize(BallSpec{Vec2::Zero(), 1}, 0.0005, box(-1.2, -1.2, 1.2, 1.2));
    const AngleCheck a = normal_angle_check(d, on_boundary(d, Vec2(1, 0)), 0.01, 4, 0.05);
    CHECK(a.cosine >= 0.75);
    CHECK(a.pass);
  }
  SUBCASE("certified Koch curve")
  {
    FlatnessOptions opts;
    opts.max_points = 500;
    const Domain d = rasterize(KochFlatSpec{5, 5, 1}, 0.002, box(-1.5, -1, 1.5, 1));
    const double r0 = 0.32;
    const FlatnessReport rep = flatness_profile(d, r0, 4, opts);
    const double eps = std::ceil((rep.sup_epsilon + rep.margin()) * 100) / 100;
    REQUIRE(eps < 0.5);
    REQUIRE(certify(d, eps, r0, 4, opts).certified);
    Rng rng(23);
    for (int k = 0; k < 100; ++k) {
      const double M = rng.uniform() < 0.5 ? 2 : 4;
      const double r = rng.uniform(10 * d.resolution(), r0 / M);
      const Vec2 x = d.boundary().col(static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(d.boundary().cols())));
      if (std::abs(x.x()) > 1.5 - r0)
        continue;
      CHECK(normal_angle_check(d, x, r, M, eps, opts).pass);
    }
  }
  CHECK_THROWS(normal_angle_check(halfspace(), Vec2(0.0025, 0), 0.1, 0.5, 0.05));
}

TEST_CASE("separation propagation")
{
  const PropagationReport hs = separation_propagation_check(halfspace(), 0.4, 1.0 / 600);
  CHECK(hs.pass);
  CHECK(hs.admissible_step == doctest::Approx(199.6667).epsilon(1e-5));
  CHECK(hs.scales.size() == scale_grid(halfspace(), 0.4, 64).size());

  FlatnessOptions opts;
  opts.max_points = 500;
  const Domain slit = rasterize(SlitSpec{0.05, 1, 1}, 0.005, box(-1.2, -1.2, 1.2, 1.2));
  const PropagationReport s = separation_propagation_check(slit, 0.4, 0.1, opts);
  CHECK_FALSE(s.pass);
  bool small_fail = false;
  for (const PropagationScale& p : s.scales)
    small_fail = small_fail || (p.r < 1 && !p.pass);
  CHECK(small_fail);
}
