#pragma once

// Planar domains as cell-center occupancy rasters plus their extracted
// boundary samples, and generators for the example domains.

#include "reiflab/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace reiflab {

using Vec2 = Eigen::Vector2d;

struct Box
{
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  bool contains(const Vec2& p) const
  {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
};

/// Row-major bitmap, row 0 at the bottom of the box. Each row is padded to
/// whole 64-bit words; padding bits are always zero.
class OccupancyGrid
{
public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }

  bool get(int i, int j) const
  {
    return (row(j)[static_cast<std::size_t>(i) >> 6] >> (static_cast<unsigned>(i) & 63U)) & 1U;
  }

  void set(int i, int j, bool v)
  {
    std::uint64_t& w = row_mut(j)[static_cast<std::size_t>(i) >> 6];
    const std::uint64_t bit = std::uint64_t(1) << (static_cast<unsigned>(i) & 63U);
    w = v ? (w | bit) : (w & ~bit);
  }

  /// Number of set cells in columns [i0, i1) of row j.
  std::size_t count_row(int j, int i0, int i1) const;
  /// First column in [i0, i1) of row j whose value differs from `value`.
  std::optional<int> first_mismatch(int j, int i0, int i1, bool value) const;

  std::size_t count() const;
  void invert();

  bool operator==(const OccupancyGrid& o) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::size_t words_per_row() const { return stride_; }

  const std::uint64_t* row(int j) const { return words_.data() + static_cast<std::size_t>(j) * stride_; }

private:
  std::uint64_t* row_mut(int j) { return words_.data() + static_cast<std::size_t>(j) * stride_; }
  void clear_padding();

  int width_ = 0;
  int height_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
};

struct Cell
{
  int i = 0;
  int j = 0;
  bool operator==(const Cell&) const = default;
};

/// Immutable discretized domain. The boundary sample set carries a spatial
/// index shared between copies.
class Domain
{
public:
  Domain() = default;
  Domain(std::string label, Box bbox, double resolution, OccupancyGrid occupancy, PointSet boundary);

  const std::string& label() const { return label_; }
  const Box& bbox() const { return bbox_; }
  double resolution() const { return resolution_; }
  const OccupancyGrid& occupancy() const { return occupancy_; }
  const PointSet& boundary() const { return boundary_; }
  const KdTree& boundary_index() const { return *index_; }

  int width() const { return occupancy_.width(); }
  int height() const { return occupancy_.height(); }

  Vec2 cell_center(int i, int j) const
  {
    return {bbox_.lo.x() + (i + 0.5) * resolution_, bbox_.lo.y() + (j + 0.5) * resolution_};
  }
  std::optional<Cell> cell_of(const Vec2& p) const;

  /// Occupancy of the cell containing p; false outside the box.
  bool inside(const Vec2& p) const;
  bool inside(int i, int j) const { return occupancy_.get(i, j); }

  /// Lebesgue measure of the occupied cells.
  double area() const;
  /// True when an occupied cell lies on the outermost ring of the grid.
  bool touches_bbox() const;

  Domain with_label(std::string label) const;

  bool operator==(const Domain& o) const;

private:
  std::string label_;
  Box bbox_;
  double resolution_ = 0;
  OccupancyGrid occupancy_;
  PointSet boundary_ = PointSet(2, 0);
  std::shared_ptr<const KdTree> index_ = std::make_shared<KdTree>();
};

// ---------------------------------------------------------------------------
// Domain specifications.

struct HalfspaceSpec
{
  Vec2 normal{0, 1};
  double offset = 0; // {x : <normal, x> > offset}
};

struct BallSpec
{
  Vec2 center = Vec2::Zero();
  double radius = 1;
};

struct RectangleSpec
{
  double a = 1; // side along x
  double b = 1; // side along y
  Vec2 center = Vec2::Zero();
};

/// B(R + t) minus the closed ball B(R).
struct AnnulusSpec
{
  double radius = 1;
  double thickness = 0.1;
  Vec2 center = Vec2::Zero();
};

/// Supergraph {y > f(x)} of a seeded trigonometric profile with Lipschitz
/// constant at most `lipschitz`.
struct LipschitzGraphSpec
{
  double lipschitz = 0.001;
  std::uint64_t seed = 0;
  double wavelength = 2.0; // longest wavelength in the profile
  int modes = 8;
};

/// Region above a Koch-type arc over the segment [-half_width, half_width]
/// on the x axis, continued by horizontal rays. Each level replaces a segment
/// by four with bumps of angle `angle_deg` pointing up.
struct KochFlatSpec
{
  double angle_deg = 3;
  int depth = 4;
  double half_width = 1;
};

/// Disk of radius R with a rounded strip of width w reaching `length` past
/// the disk along +x.
struct TentacleSpec
{
  double width = 0.05;
  double length = 1;
  double radius = 1;
};

/// Disk of radius R minus a rounded strip of width w cut `depth` deep from
/// the rightmost point along -x.
struct SlitSpec
{
  double width = 0.05;
  double depth = 1;
  double radius = 1;
};

/// Union of disjoint disks with a common radius.
struct DisksSpec
{
  std::vector<Vec2> centers;
  double radius = 1;
};

using DomainSpec = std::variant<HalfspaceSpec, BallSpec, RectangleSpec, AnnulusSpec, LipschitzGraphSpec,
                                KochFlatSpec, TentacleSpec, SlitSpec, DisksSpec>;

std::string spec_kind(const DomainSpec& spec);

/// Exact membership test of the continuous domain.
bool contains(const DomainSpec& spec, const Vec2& p);

/// Smallest feature width the raster must resolve, if the spec has one.
std::optional<double> thinnest_feature(const DomainSpec& spec);

/// Bounding box of the spec's support; nullopt for unbounded domains.
std::optional<Box> support(const DomainSpec& spec);

/// Koch arc vertices for a KochFlatSpec, left to right.
std::vector<Vec2> koch_arc(const KochFlatSpec& spec);

/// Cell-center rasterization of `spec` over `bbox`. The box is extended on
/// its upper sides to a whole number of cells.
Domain rasterize(const DomainSpec& spec, double resolution, const Box& bbox, std::string label = {});

/// Domain built from an existing occupancy grid; boundary is re-extracted.
Domain from_occupancy(std::string label, const Box& bbox, double resolution, OccupancyGrid occupancy);

/// Midpoints of every cell edge separating an occupied cell from an empty one.
PointSet boundary_samples(const Domain& d);

Domain complement(const Domain& d);

struct NearestBoundary
{
  Vec2 point;
  double distance = 0;
};

NearestBoundary nearest_boundary_point(const Domain& d, const Vec2& x);

/// d(x, complement): distance to the boundary samples for points the raster
/// marks inside, 0 otherwise.
double distance_to_complement(const Domain& d, const Vec2& x);

} // namespace reiflab
