#include <doctest.h>

#include "reiflab/jones.hpp"
#include "reiflab/rng.hpp"

#include <cmath>

using namespace reiflab;

namespace {

Box box(double x0, double y0, double x1, double y1) { return {Vec2(x0, y0), Vec2(x1, y1)}; }

const Domain& halfspace()
{
  static const Domain d = rasterize(HalfspaceSpec{}, 0.005, box(-1, -1, 1, 1), "halfspace");
  return d;
}

const Domain& wide_halfspace()
{
  static const Domain d = rasterize(HalfspaceSpec{}, 0.01, box(-4, -4, 4, 4), "halfspace");
  return d;
}

bool near(const Vec2& a, const Vec2& b, double tol) { return (a - b).norm() <= tol; }

} // namespace

TEST_CASE("polyline arc length")
{
  Polyline p({Vec2(0, 0), Vec2(3, 4), Vec2(3, 5)});
  CHECK(p.length() == doctest::Approx(6));
  CHECK(p.arc_length(1) == doctest::Approx(5));
  CHECK(near(p.at(2.5), Vec2(1.5, 2), 1e-12));
  CHECK(near(p.at(-1), Vec2(0, 0), 0));
  CHECK(near(p.at(10), Vec2(3, 5), 0));
  CHECK(p.reversed().length() == doctest::Approx(6));
  CHECK(near(p.reversed().front(), Vec2(3, 5), 0));
  p.append(Polyline({Vec2(3, 5), Vec2(4, 5)}));
  CHECK(p.size() == 5);
  CHECK(p.length() == doctest::Approx(7));
  CHECK_THROWS(Polyline({Vec2(0, std::nan(""))}));
}

TEST_CASE("y_point")
{
  SUBCASE("halfspace")
  {
    const Vec2 y = y_point(halfspace(), Vec2(0.0025, 0), 0.5);
    CHECK(near(y, Vec2(0.0025, 0.5), 1e-9));
  }
  SUBCASE("unit circle: inward radial direction")
  {
    const Domain d = rasterize(BallSpec{Vec2::Zero(), 1}, 0.002, box(-1.2, -1.2, 1.2, 1.2));
    const Vec2 x0 = nearest_boundary_point(d, Vec2(1, 0)).point;
    const double rho = 0.05;
    const Vec2 y = y_point(d, x0, rho);
    CHECK((y - x0).norm() == doctest::Approx(rho));
    CHECK(near(y, x0 - rho * x0.normalized(), rho * 0.06));
  }
  SUBCASE("Koch curve: inside at distance rho")
  {
    const Domain d = rasterize(KochFlatSpec{3, 4, 1}, 0.004, box(-1.5, -1, 1.5, 1));
    Rng rng(8);
    for (int k = 0; k < 20; ++k) {
      const Vec2 x0 = nearest_boundary_point(d, Vec2(rng.uniform(-0.9, 0.9), 0.02)).point;
      const double rho = rng.uniform(0.05, 0.3);
      const Vec2 y = y_point(d, x0, rho);
      CHECK((y - x0).norm() == doctest::Approx(rho));
      CHECK(d.inside(y));
    }
  }
  SUBCASE("no orientation on a crack")
  {
    const Domain ring = rasterize(AnnulusSpec{1, 0.01, Vec2::Zero()}, 0.002, box(-1.3, -1.3, 1.3, 1.3));
    const Domain d = complement(ring);
    CHECK_THROWS_WITH(y_point(d, nearest_boundary_point(d, Vec2(1.01, 0)).point, 0.2), "cannot orient normal");
  }
}

TEST_CASE("gamma chain on a halfspace")
{
  const Domain& d = halfspace();
  SUBCASE("short case")
  {
    const Chain c = gamma_chain(d, Vec2(0.0025, 0.1), 0.1);
    CHECK(c.short_case);
    REQUIRE(c.curve.size() == 2);
    CHECK(near(c.curve.back(), Vec2(0.0025, 0.1), 1e-9));
    CHECK(c.curve.length() <= 4 * c.r);
  }
  SUBCASE("dyadic case")
  {
    const Chain c = gamma_chain(d, Vec2(0.0025, 0.1), 0.4);
    CHECK_FALSE(c.short_case);
    CHECK(c.k0 == 2);
    CHECK_FALSE(c.floor_limited);
    REQUIRE(c.curve.size() == 4);
    CHECK(near(c.curve.vertices()[1], Vec2(0.0025, 0.1), 1e-9));
    CHECK(near(c.curve.vertices()[2], Vec2(0.0025, 0.2), 1e-9));
    CHECK(near(c.curve.vertices()[3], Vec2(0.0025, 0.4), 1e-9));
    CHECK(c.curve.length() == doctest::Approx(0.3));
    CHECK(verify_chain(d, c).pass());
  }
  SUBCASE("scale floor")
  {
    const Chain c = gamma_chain(d, Vec2(0.0025, 0.012), 0.4);
    CHECK(c.floor_limited);
    CHECK(std::ldexp(0.4, -c.k0) >= 10 * d.resolution());
    CHECK(verify_chain(d, c).pass());
  }
  CHECK_THROWS_WITH(gamma_chain(d, Vec2(0.0025, -0.1), 0.4), "point is not inside the domain");
  CHECK_THROWS_WITH(gamma_chain(d, Vec2(0.0025, 0.3), 0.1), "scale out of range");
  CHECK_THROWS_WITH(gamma_chain(d, Vec2(0.0025, 0.1), 0.4, 1.4), "scale out of range");
}

TEST_CASE("chain bounds on random admissible inputs")
{
  const Domain d = rasterize(LipschitzGraphSpec{0.001, 3, 2, 8}, 0.002, box(-1, -1, 1, 1));
  Rng rng(31);
  const double r0 = 1.4;
  for (int k = 0; k < 40; ++k) {
    const Vec2 x(rng.uniform(-0.5, 0.5), rng.uniform(0.005, 0.2));
    const double dist = distance_to_complement(d, x);
    const double r = rng.uniform(std::max(dist / 2, 10 * d.resolution()), r0 / 7);
    const Chain c = gamma_chain(d, x, r, r0);
    const ChainCheck chk = verify_chain(d, c);
    CHECK(chk.length <= 4 * r + 4 * d.resolution());
    CHECK(chk.cigar_ok);
    CHECK_FALSE(chk.escaped);
  }
}

TEST_CASE("jones curve")
{
  SUBCASE("deep points give a segment")
  {
    const Domain& d = wide_halfspace();
    const Polyline c = jones_curve(d, Vec2(0, 2.5), Vec2(1, 2.5), 14);
    CHECK(c.size() == 2);
    CHECK(verify_curve(d, c, Vec2(0, 2.5), Vec2(1, 2.5), kJonesDelta).pass);
  }
  SUBCASE("points near the boundary use chains")
  {
    const Domain& d = wide_halfspace();
    const Vec2 x(-0.995, 0.105), y(1.005, 0.105);
    const Polyline c = jones_curve(d, x, y, 14);
    CHECK(c.size() > 2);
    CHECK(c.length() == doctest::Approx(5.79).epsilon(0.01));
    bool left = false, right = false;
    for (const Vec2& v : c.vertices()) {
      left = left || near(v, Vec2(-0.995, 2), 1e-6);
      right = right || near(v, Vec2(1.005, 2), 1e-6);
    }
    CHECK(left);
    CHECK(right);
    const CigarReport rep = verify_curve(d, c, x, y, kJonesDelta);
    CHECK(rep.pass);
    CHECK(rep.length_ratio <= kJonesLengthFactor);
    CHECK(rep.worst_delta >= kJonesDelta);
  }
  SUBCASE("segment deep inside a large ball")
  {
    const Domain d = rasterize(BallSpec{Vec2::Zero(), 10}, 0.05, box(-12, -12, 12, 12));
    const Vec2 x(-0.1, 0), y(0.1, 0);
    const Polyline c = jones_curve(d, x, y, 2);
    CHECK(c.size() == 2);
    const CigarReport rep = verify_curve(d, c, x, y, 4);
    CHECK(rep.worst_delta >= 4);
    CHECK(rep.pass);
  }
  CHECK_THROWS_WITH(jones_curve(wide_halfspace(), Vec2(0, 1), Vec2(0, 1), 14), "endpoints coincide");
  CHECK_THROWS_WITH(jones_curve(wide_halfspace(), Vec2(0, 1), Vec2(2.5, 1), 14), "beyond Jones radius");
  CHECK_THROWS_WITH(jones_curve(wide_halfspace(), Vec2(0, -1), Vec2(0, 1), 14), "point is not inside the domain");
}

TEST_CASE("a segment crossing a slit fails")
{
  const Domain d = rasterize(SlitSpec{0.05, 1, 1}, 0.005, box(-1.2, -1.2, 1.2, 1.2));
  const Vec2 x(0.5, 0.1), y(0.5, -0.1);
  const CigarReport rep = verify_curve(d, Polyline({x, y}), x, y, kJonesDelta);
  CHECK(rep.escaped);
  CHECK(rep.worst_delta == 0);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("verify_curve preconditions")
{
  const Domain& d = halfspace();
  const Polyline c({Vec2(0, 0.5), Vec2(0.1, 0.5)});
  CHECK_THROWS_WITH(verify_curve(d, c, Vec2(0, 0.5), Vec2(0.2, 0.5), 0.1), "curve endpoints do not match");
  CHECK_THROWS_WITH(verify_curve(d, c, Vec2(0, 0.5), Vec2(0.1, 0.5), 0), "delta must be positive");
}

TEST_CASE("segment cigar maximum is a quarter of the length")
{
  Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    const Vec2 x(rng.uniform(-1, 1), rng.uniform(-1, 1)), y(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double step = rng.uniform(0.001, 0.3);
    CHECK(std::abs(segment_cigar_max(x, y, step) - (x - y).norm() / 4) <= 1e-9);
  }
  CHECK_THROWS_WITH(segment_cigar_max(Vec2(1, 1), Vec2(1, 1), 0.1), "endpoints coincide");
}

TEST_CASE("empirical constant is deterministic")
{
  const Domain& d = halfspace();
  FlatnessOptions one, many;
  one.jobs = 1;
  many.jobs = 3;
  const JonesConstant a = empirical_jones_constant(d, 0.1, 20, 5, 1.2, one);
  const JonesConstant b = empirical_jones_constant(d, 0.1, 20, 5, 1.2, many);
  const JonesConstant c = empirical_jones_constant(d, 0.1, 20, 6, 1.2, one);
  CHECK(a.delta_star == b.delta_star);
  CHECK(a.worst == b.worst);
  bool differs = false;
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    CHECK(a.pairs[k].x == b.pairs[k].x);
    CHECK(a.pairs[k].y == b.pairs[k].y);
    CHECK(a.pairs[k].pass);
    CHECK(a.pairs[k].distance <= 0.1);
    differs = differs || a.pairs[k].x != c.pairs[k].x;
  }
  CHECK(differs);
  CHECK(a.delta_star >= kJonesDelta);
  CHECK_THROWS_WITH(empirical_jones_constant(d, 0.01, 5, 0, 1.2), "R0 must be at least 10 cells");
  CHECK_THROWS_WITH(empirical_jones_constant(d, 0.1, 0, 0, 1.2), "n_pairs must be at least 1");
}
