#include <doctest.h>

#include "reiflab/geometry.hpp"
#include "reiflab/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace reiflab;

namespace {

PointSet circle(double radius, int n, double phase = 0)
{
  PointSet s(2, n);
  for (int k = 0; k < n; ++k) {
    const double t = phase + 2 * std::numbers::pi * k / n;
    s.col(k) << radius * std::cos(t), radius * std::sin(t);
  }
  return s;
}

PointSet random_set(Rng& rng, int n, int dim = 2)
{
  PointSet s(dim, n);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < dim; ++a)
      s(a, k) = rng.uniform(-1, 1);
  return s;
}

PointSet set_of(std::initializer_list<std::initializer_list<double>> pts)
{
  std::vector<Point> v;
  for (const auto& c : pts)
    v.push_back(make_point(c));
  return make_point_set(v);
}

double exhaustive_min(const Point& p, const PointSet& s)
{
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < s.cols(); ++k)
    best = std::min(best, (s.col(k) - p).norm());
  return best;
}

} // namespace

TEST_CASE("dist_point_set")
{
  CHECK(dist_point_set(make_point<double>({0, 0}), set_of({{0, 0}, {1, 1}})) == 0);
  CHECK(dist_point_set(make_point<double>({0, 0}), set_of({{3, 4}})) == doctest::Approx(5));

  const PointSet c = circle(1, 10000, 0.3);
  const Point o = make_point<double>({0, 0});
  CHECK(dist_point_set(o, c) == doctest::Approx(exhaustive_min(o, c)).epsilon(1e-15));
  CHECK(std::abs(dist_point_set(o, c) - 1) < 1e-12);

  CHECK_THROWS_WITH(dist_point_set(o, PointSet(2, 0)), "empty set");
}

TEST_CASE("hausdorff examples")
{
  const PointSet s = set_of({{0, 0}, {1, 2}, {-3, 0.5}});
  CHECK(hausdorff(s, s) == 0);
  CHECK(hausdorff(set_of({{0, 0}}), set_of({{3, 4}})) == doctest::Approx(5));

  const int n = 4000;
  const PointSet a = circle(1, n), b = circle(1.1, n);
  const double gap = 2 * std::numbers::pi * 1.1 / n;
  CHECK(std::abs(hausdorff(a, b) - 0.1) <= gap);

  CHECK_THROWS_WITH(hausdorff(PointSet(2, 0), s), "empty set");
  CHECK_THROWS_WITH(hausdorff(s, PointSet(2, 0)), "empty set");
}

TEST_CASE("hausdorff witness realizes the value")
{
  const PointSet s = set_of({{0, 0}, {1, 0}});
  const PointSet t = set_of({{0, 0}, {4, 0}});
  const auto w = hausdorff_witness(s, t);
  CHECK(w.value == doctest::Approx(3));
  CHECK((w.from - w.to).norm() == doctest::Approx(3));
}

TEST_CASE("hausdorff brute force and indexed paths agree")
{
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const PointSet a = random_set(rng, 1500 + 300 * trial);
    const PointSet b = random_set(rng, 1200 + 500 * trial);
    const double brute = hausdorff(a, b, HausdorffMethod::BruteForce);
    const double indexed = hausdorff(a, b, HausdorffMethod::Indexed);
    CHECK(std::abs(brute - indexed) <= 1e-12);
    CHECK(std::abs(hausdorff(a, b) - brute) <= 1e-12);
  }
}

TEST_CASE("hausdorff properties on random sets")
{
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const PointSet s = random_set(rng, 1 + static_cast<int>(rng.uniform() * 40));
    const PointSet t = random_set(rng, 1 + static_cast<int>(rng.uniform() * 40));
    const PointSet u = random_set(rng, 1 + static_cast<int>(rng.uniform() * 40));
    CHECK(hausdorff(s, t) == hausdorff(t, s));
    CHECK(hausdorff(s, u) <= hausdorff(s, t) + hausdorff(t, u) + 1e-12);

    const Point p = random_set(rng, 1).col(0);
    PointSet ps(2, s.cols() + 1);
    ps << p, s;
    CHECK(dist_point_set(p, s) <= hausdorff(ps, s) + 1e-15);
  }
}

TEST_CASE("geometry is dimension generic")
{
  Rng rng(3);
  const PointSet a = random_set(rng, 300, 3), b = random_set(rng, 200, 3);
  CHECK(std::abs(hausdorff(a, b, HausdorffMethod::BruteForce) - hausdorff(a, b, HausdorffMethod::Indexed)) <= 1e-12);
  CHECK(dist_point_set(make_point<double>({0, 0, 0}), set_of({{1, 2, 2}})) == doctest::Approx(3));
  CHECK_THROWS(hausdorff(a, random_set(rng, 10, 2)));
}

TEST_CASE("kd-tree nearest breaks ties lexicographically")
{
  const PointSet s = set_of({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  const KdTree tree(s);
  const auto hit = tree.nearest(make_point<double>({0, 0}));
  CHECK(s(0, hit.index) == -1);
  CHECK(s(1, hit.index) == 0);
}

TEST_CASE("kd-tree range query matches a scan")
{
  Rng rng(9);
  const PointSet s = random_set(rng, 3000);
  const KdTree tree(s);
  std::vector<Eigen::Index> got;
  for (int q = 0; q < 20; ++q) {
    const Point c = random_set(rng, 1).col(0);
    const double r = rng.uniform(0.05, 0.5);
    tree.within(c, r, got);
    std::sort(got.begin(), got.end());
    std::vector<Eigen::Index> want;
    for (Eigen::Index k = 0; k < s.cols(); ++k)
      if ((s.col(k) - c).norm() <= r)
        want.push_back(k);
    CHECK(got == want);
  }
}

TEST_CASE("angle_cosine")
{
  const Point up = make_point<double>({0, 1}), right = make_point<double>({1, 0});
  CHECK(angle_cosine(up, up) == 1);
  CHECK(angle_cosine(right, up) == 0);
  const Point tilted = make_point<double>({std::cos(0.3), std::sin(0.3)});
  CHECK(angle_cosine(right, tilted) == doctest::Approx(0.955336).epsilon(1e-6));
  CHECK(angle_cosine(right, tilted) == angle_cosine(tilted, right));
  CHECK_THROWS_WITH(angle_cosine(make_point<double>({1, 1}), up), "not normalized");

  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const double a = rng.uniform(0, 7), b = rng.uniform(0, 7);
    const double c = angle_cosine(make_point<double>({std::cos(a), std::sin(a)}), make_point<double>({std::cos(b), std::sin(b)}));
    CHECK(std::abs(c) <= 1 + 1e-12);
  }
}

TEST_CASE("hyperplane")
{
  CHECK_THROWS_WITH(Hyperplane(make_point<double>({0, 0}), make_point<double>({0, 2})), "not normalized");
  const Hyperplane h(make_point<double>({0, 1}), make_point<double>({0, 1}));
  CHECK(h.signed_distance(make_point<double>({5, 3})) == doctest::Approx(2));
  CHECK(h.flipped().signed_distance(make_point<double>({5, 3})) == doctest::Approx(-2));
  CHECK_THROWS(make_point<double>({0, std::numeric_limits<double>::quiet_NaN()}));
}
