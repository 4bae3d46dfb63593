#pragma once

// Point-set primitives: points, hyperplanes, distances and the Hausdorff
// distance between finite samples. Dimension is a runtime quantity; a point
// set is a dense N x M matrix holding one point per column.

#include "reiflab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace reiflab {

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using PointSetT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Point = PointT<double>;
using PointSet = PointSetT<double>;

template <typename Scalar>
struct HyperplaneT
{
  using Index = Eigen::Index;

  PointT<Scalar> base;
  PointT<Scalar> normal;

  HyperplaneT() = default;

  HyperplaneT(PointT<Scalar> b, PointT<Scalar> n) : base(std::move(b)), normal(std::move(n))
  {
    if (base.size() != normal.size())
      throw Error("hyperplane: base and normal dimensions differ");
    if (!base.allFinite())
      throw Error("hyperplane: base not finite");
    if (std::abs(normal.norm() - Scalar(1)) > Scalar(1e-12))
      throw Error("not normalized");
  }

  Index dim() const { return base.size(); }

  template <typename Derived>
  Scalar signed_distance(const Eigen::MatrixBase<Derived>& p) const
  {
    return normal.dot(p - base);
  }

  HyperplaneT flipped() const { return HyperplaneT(base, -normal); }
};

using Hyperplane = HyperplaneT<double>;

/// Builds a point from coordinates, rejecting non-finite entries.
template <typename Scalar = double>
PointT<Scalar> make_point(std::initializer_list<Scalar> coords)
{
  PointT<Scalar> p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (Scalar c : coords)
    p(i++) = c;
  if (!p.allFinite())
    throw Error("point coordinates must be finite");
  return p;
}

/// Packs a list of equally sized points into an N x M point set.
template <typename Scalar>
PointSetT<Scalar> make_point_set(const std::vector<PointT<Scalar>>& points)
{
  if (points.empty())
    return PointSetT<Scalar>(0, 0);
  PointSetT<Scalar> s(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != s.rows())
      throw Error("point set: mixed dimensions");
    s.col(static_cast<Eigen::Index>(k)) = points[k];
  }
  return s;
}

/// Nearest-neighbour and fixed-radius queries over a point set in any
/// dimension. The tree keeps its own copy of the points.
template <typename Scalar>
class KdTreeT
{
public:
  using Index = Eigen::Index;

  struct Hit
  {
    Index index = -1;
    Scalar dist2 = std::numeric_limits<Scalar>::infinity();
  };

  KdTreeT() = default;

  explicit KdTreeT(PointSetT<Scalar> points) : points_(std::move(points))
  {
    order_.resize(static_cast<std::size_t>(points_.cols()));
    std::iota(order_.begin(), order_.end(), Index(0));
    if (points_.cols() > 0)
      build(0, points_.cols(), 0);
  }

  const PointSetT<Scalar>& points() const { return points_; }
  Index size() const { return points_.cols(); }
  Index dim() const { return points_.rows(); }

  // Ties at equal distance resolve to the lexicographically smallest point.
  template <typename Derived>
  Hit nearest(const Eigen::MatrixBase<Derived>& q) const
  {
    Hit best;
    if (size() == 0)
      return best;
    nearest_rec(q, 0, size(), 0, best);
    return best;
  }

  template <typename Derived>
  void within(const Eigen::MatrixBase<Derived>& q, Scalar radius, std::vector<Index>& out) const
  {
    out.clear();
    if (size() == 0)
      return;
    within_rec(q, radius * radius, 0, size(), 0, out);
  }

private:
  static constexpr Index kLeaf = 8;

  struct Node
  {
    Index axis;
    Scalar split;
  };

  // Node information is stored at the midpoint slot of each range.
  void build(Index lo, Index hi, int depth)
  {
    if (hi - lo <= kLeaf)
      return;
    const Index axis = widest_axis(lo, hi);
    const Index mid = lo + (hi - lo) / 2;
    auto first = order_.begin() + lo;
    std::nth_element(first, order_.begin() + mid, order_.begin() + hi,
                     [&](Index a, Index b) { return points_(axis, a) < points_(axis, b); });
    if (nodes_.size() < order_.size())
      nodes_.resize(order_.size());
    nodes_[static_cast<std::size_t>(mid)] = {axis, points_(axis, order_[static_cast<std::size_t>(mid)])};
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  Index widest_axis(Index lo, Index hi) const
  {
    Index best = 0;
    Scalar best_extent = Scalar(-1);
    for (Index a = 0; a < dim(); ++a) {
      Scalar mn = std::numeric_limits<Scalar>::infinity(), mx = -mn;
      for (Index k = lo; k < hi; ++k) {
        const Scalar v = points_(a, order_[static_cast<std::size_t>(k)]);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      if (mx - mn > best_extent) {
        best_extent = mx - mn;
        best = a;
      }
    }
    return best;
  }

  bool lex_less(Index a, Index b) const
  {
    for (Index r = 0; r < dim(); ++r) {
      if (points_(r, a) < points_(r, b))
        return true;
      if (points_(r, a) > points_(r, b))
        return false;
    }
    return a < b;
  }

  template <typename Derived>
  void consider(const Eigen::MatrixBase<Derived>& q, Index idx, Hit& best) const
  {
    const Scalar d2 = (points_.col(idx) - q).squaredNorm();
    if (d2 < best.dist2 || (d2 == best.dist2 && best.index >= 0 && lex_less(idx, best.index))) {
      best.dist2 = d2;
      best.index = idx;
    }
  }

  template <typename Derived>
  void nearest_rec(const Eigen::MatrixBase<Derived>& q, Index lo, Index hi, int depth, Hit& best) const
  {
    if (hi - lo <= kLeaf) {
      for (Index k = lo; k < hi; ++k)
        consider(q, order_[static_cast<std::size_t>(k)], best);
      return;
    }
    const Index mid = lo + (hi - lo) / 2;
    const Node& node = nodes_[static_cast<std::size_t>(mid)];
    consider(q, order_[static_cast<std::size_t>(mid)], best);
    const Scalar diff = q(node.axis) - node.split;
    const bool left_first = diff < 0;
    if (left_first)
      nearest_rec(q, lo, mid, depth + 1, best);
    else
      nearest_rec(q, mid + 1, hi, depth + 1, best);
    if (diff * diff <= best.dist2) {
      if (left_first)
        nearest_rec(q, mid + 1, hi, depth + 1, best);
      else
        nearest_rec(q, lo, mid, depth + 1, best);
    }
  }

  template <typename Derived>
  void within_rec(const Eigen::MatrixBase<Derived>& q, Scalar r2, Index lo, Index hi, int depth,
                  std::vector<Index>& out) const
  {
    if (hi - lo <= kLeaf) {
      for (Index k = lo; k < hi; ++k) {
        const Index idx = order_[static_cast<std::size_t>(k)];
        if ((points_.col(idx) - q).squaredNorm() <= r2)
          out.push_back(idx);
      }
      return;
    }
    const Index mid = lo + (hi - lo) / 2;
    const Node& node = nodes_[static_cast<std::size_t>(mid)];
    const Index idx = order_[static_cast<std::size_t>(mid)];
    if ((points_.col(idx) - q).squaredNorm() <= r2)
      out.push_back(idx);
    const Scalar diff = q(node.axis) - node.split;
    if (diff <= 0 || diff * diff <= r2)
      within_rec(q, r2, lo, mid, depth + 1, out);
    if (diff >= 0 || diff * diff <= r2)
      within_rec(q, r2, mid + 1, hi, depth + 1, out);
  }

  PointSetT<Scalar> points_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

using KdTree = KdTreeT<double>;

/// Distance from p to the nearest point of s.
template <typename Scalar, typename Derived>
Scalar dist_point_set(const Eigen::MatrixBase<Derived>& p, const PointSetT<Scalar>& s)
{
  if (s.cols() == 0)
    throw Error("empty set");
  if (p.size() != s.rows())
    throw Error("dimension mismatch");
  return std::sqrt((s.colwise() - p).colwise().squaredNorm().minCoeff());
}

template <typename Scalar>
struct HausdorffResultT
{
  Scalar value = 0;
  // The sup side: `from` lies in one set, `to` is its nearest point in the other.
  PointT<Scalar> from;
  PointT<Scalar> to;
};

using HausdorffResult = HausdorffResultT<double>;

namespace detail {

// Below this many points in total the Hausdorff distance is brute-forced.
inline constexpr Eigen::Index kHausdorffBruteForceLimit = 2000;

template <typename Scalar>
void directed_brute(const PointSetT<Scalar>& a, const PointSetT<Scalar>& b, HausdorffResultT<Scalar>& res,
                    Scalar& best2)
{
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    Eigen::Index j = 0;
    const Scalar d2 = (b.colwise() - a.col(i)).colwise().squaredNorm().minCoeff(&j);
    if (d2 > best2) {
      best2 = d2;
      res.from = a.col(i);
      res.to = b.col(j);
    }
  }
}

template <typename Scalar>
void directed_indexed(const PointSetT<Scalar>& a, const KdTreeT<Scalar>& b, HausdorffResultT<Scalar>& res,
                      Scalar& best2)
{
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    const auto hit = b.nearest(a.col(i));
    if (hit.dist2 > best2) {
      best2 = hit.dist2;
      res.from = a.col(i);
      res.to = b.points().col(hit.index);
    }
  }
}

template <typename Scalar>
void check_pair(const PointSetT<Scalar>& s, const PointSetT<Scalar>& t)
{
  if (s.cols() == 0 || t.cols() == 0)
    throw Error("empty set");
  if (s.rows() != t.rows())
    throw Error("dimension mismatch");
}

} // namespace detail

enum class HausdorffMethod { Auto, BruteForce, Indexed };

/// Two-sided Hausdorff distance between finite samples, with the witness pair
/// realizing the larger one-sided supremum.
template <typename Scalar>
HausdorffResultT<Scalar> hausdorff_witness(const PointSetT<Scalar>& s, const PointSetT<Scalar>& t,
                                           HausdorffMethod method = HausdorffMethod::Auto)
{
  detail::check_pair(s, t);
  if (method == HausdorffMethod::Auto)
    method = s.cols() + t.cols() < detail::kHausdorffBruteForceLimit ? HausdorffMethod::BruteForce
                                                                     : HausdorffMethod::Indexed;
  HausdorffResultT<Scalar> res;
  res.from = s.col(0);
  res.to = s.col(0);
  Scalar best2 = Scalar(-1);
  if (method == HausdorffMethod::BruteForce) {
    detail::directed_brute(s, t, res, best2);
    detail::directed_brute(t, s, res, best2);
  } else {
    const KdTreeT<Scalar> ti(t), si(s);
    detail::directed_indexed(s, ti, res, best2);
    detail::directed_indexed(t, si, res, best2);
  }
  res.value = std::sqrt(std::max(best2, Scalar(0)));
  return res;
}

template <typename Scalar>
Scalar hausdorff(const PointSetT<Scalar>& s, const PointSetT<Scalar>& t,
                 HausdorffMethod method = HausdorffMethod::Auto)
{
  return hausdorff_witness(s, t, method).value;
}

/// Inner product of two unit directions.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar angle_cosine(const Eigen::MatrixBase<DerivedA>& n1, const Eigen::MatrixBase<DerivedB>& n2)
{
  using Scalar = typename DerivedA::Scalar;
  if (n1.size() != n2.size())
    throw Error("dimension mismatch");
  if (std::abs(n1.norm() - Scalar(1)) > Scalar(1e-9) || std::abs(n2.norm() - Scalar(1)) > Scalar(1e-9))
    throw Error("not normalized");
  return std::clamp(n1.dot(n2), Scalar(-1), Scalar(1));
}

} // namespace reiflab
