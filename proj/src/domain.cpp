#include "reiflab/domain.hpp"

#include <bit>
#include <cmath>

namespace reiflab {

// ---------------------------------------------------------------------------
// OccupancyGrid

OccupancyGrid::OccupancyGrid(int width, int height) : width_(width), height_(height)
{
  if (width <= 0 || height <= 0)
    throw Error("occupancy grid must have positive dimensions");
  stride_ = (static_cast<std::size_t>(width) + 63) / 64;
  words_.assign(stride_ * static_cast<std::size_t>(height), 0);
}

namespace {

// Mask selecting bits [b0, b1) of a word, 0 <= b0 <= b1 <= 64.
std::uint64_t bit_range(unsigned b0, unsigned b1)
{
  const std::uint64_t hi = b1 >= 64 ? ~std::uint64_t(0) : ((std::uint64_t(1) << b1) - 1);
  const std::uint64_t lo = (std::uint64_t(1) << b0) - 1;
  return hi & ~lo;
}

} // namespace

std::size_t OccupancyGrid::count_row(int j, int i0, int i1) const
{
  i0 = std::max(i0, 0);
  i1 = std::min(i1, width_);
  if (i0 >= i1)
    return 0;
  const std::uint64_t* r = row(j);
  const std::size_t w0 = static_cast<std::size_t>(i0) >> 6, w1 = static_cast<std::size_t>(i1 - 1) >> 6;
  const unsigned b0 = static_cast<unsigned>(i0) & 63U, b1 = (static_cast<unsigned>(i1 - 1) & 63U) + 1;
  if (w0 == w1)
    return static_cast<std::size_t>(std::popcount(r[w0] & bit_range(b0, b1)));
  std::size_t n = static_cast<std::size_t>(std::popcount(r[w0] & bit_range(b0, 64)));
  for (std::size_t w = w0 + 1; w < w1; ++w)
    n += static_cast<std::size_t>(std::popcount(r[w]));
  n += static_cast<std::size_t>(std::popcount(r[w1] & bit_range(0, b1)));
  return n;
}

std::optional<int> OccupancyGrid::first_mismatch(int j, int i0, int i1, bool value) const
{
  i0 = std::max(i0, 0);
  i1 = std::min(i1, width_);
  const std::uint64_t* r = row(j);
  for (int i = i0; i < i1;) {
    const std::size_t w = static_cast<std::size_t>(i) >> 6;
    const unsigned b0 = static_cast<unsigned>(i) & 63U;
    const int word_end = static_cast<int>((w + 1) * 64);
    const unsigned b1 = static_cast<unsigned>(std::min(i1, word_end) - static_cast<int>(w * 64));
    std::uint64_t bits = value ? ~r[w] : r[w];
    bits &= bit_range(b0, b1);
    if (bits != 0)
      return static_cast<int>(w * 64) + std::countr_zero(bits);
    i = std::min(i1, word_end);
  }
  return std::nullopt;
}

std::size_t OccupancyGrid::count() const
{
  std::size_t n = 0;
  for (std::uint64_t w : words_)
    n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

void OccupancyGrid::invert()
{
  for (std::uint64_t& w : words_)
    w = ~w;
  clear_padding();
}

void OccupancyGrid::clear_padding()
{
  const unsigned tail = static_cast<unsigned>(width_) & 63U;
  if (tail == 0)
    return;
  const std::uint64_t keep = bit_range(0, tail);
  for (int j = 0; j < height_; ++j)
    row_mut(j)[stride_ - 1] &= keep;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(std::string label, Box bbox, double resolution, OccupancyGrid occupancy, PointSet boundary)
  : label_(std::move(label)), bbox_(std::move(bbox)), resolution_(resolution), occupancy_(std::move(occupancy)),
    boundary_(std::move(boundary))
{
  if (!(resolution_ > 0) || !std::isfinite(resolution_))
    throw Error("resolution must be positive");
  const double w = occupancy_.width() * resolution_, h = occupancy_.height() * resolution_;
  if (std::abs(bbox_.width() - w) > 1e-9 * std::max(1.0, w) || std::abs(bbox_.height() - h) > 1e-9 * std::max(1.0, h))
    throw Error("occupancy grid dimensions do not match bbox/resolution");
  if (boundary_.rows() != 2 && boundary_.cols() > 0)
    throw Error("boundary samples must be planar");
  if (boundary_.cols() == 0)
    boundary_.resize(2, 0);
  index_ = std::make_shared<KdTree>(boundary_);
}

std::optional<Cell> Domain::cell_of(const Vec2& p) const
{
  const double fx = std::floor((p.x() - bbox_.lo.x()) / resolution_);
  const double fy = std::floor((p.y() - bbox_.lo.y()) / resolution_);
  if (!(fx >= 0 && fy >= 0 && fx < width() && fy < height()))
    return std::nullopt;
  return Cell{static_cast<int>(fx), static_cast<int>(fy)};
}

bool Domain::inside(const Vec2& p) const
{
  const auto c = cell_of(p);
  return c && occupancy_.get(c->i, c->j);
}

double Domain::area() const
{
  return static_cast<double>(occupancy_.count()) * resolution_ * resolution_;
}

bool Domain::touches_bbox() const
{
  const int w = width(), h = height();
  if (occupancy_.count_row(0, 0, w) > 0 || occupancy_.count_row(h - 1, 0, w) > 0)
    return true;
  for (int j = 0; j < h; ++j)
    if (occupancy_.get(0, j) || occupancy_.get(w - 1, j))
      return true;
  return false;
}

Domain Domain::with_label(std::string label) const
{
  Domain d = *this;
  d.label_ = std::move(label);
  return d;
}

bool Domain::operator==(const Domain& o) const
{
  return label_ == o.label_ && bbox_.lo == o.bbox_.lo && bbox_.hi == o.bbox_.hi && resolution_ == o.resolution_ &&
         occupancy_ == o.occupancy_ && boundary_.rows() == o.boundary_.rows() &&
         boundary_.cols() == o.boundary_.cols() && boundary_ == o.boundary_;
}

// ---------------------------------------------------------------------------
// Boundary extraction

namespace {

PointSet extract_boundary(const Box& bbox, double res, const OccupancyGrid& g)
{
  const int w = g.width(), h = g.height();
  std::vector<double> xs;
  auto push = [&](double x, double y) {
    xs.push_back(x);
    xs.push_back(y);
  };
  const std::size_t stride = g.words_per_row();
  // Horizontal neighbours (i, j) | (i + 1, j): shared vertical edge.
  for (int j = 0; j < h; ++j) {
    const std::uint64_t* r = g.row(j);
    const double y = bbox.lo.y() + (j + 0.5) * res;
    for (std::size_t k = 0; k < stride; ++k) {
      const std::uint64_t next = k + 1 < stride ? r[k + 1] : 0;
      std::uint64_t diff = r[k] ^ ((r[k] >> 1) | (next << 63));
      const int base = static_cast<int>(k * 64);
      while (diff != 0) {
        const int i = base + std::countr_zero(diff);
        diff &= diff - 1;
        if (i >= w - 1)
          break;
        push(bbox.lo.x() + (i + 1) * res, y);
      }
    }
  }
  // Vertical neighbours (i, j) | (i, j + 1): shared horizontal edge.
  for (int j = 0; j + 1 < h; ++j) {
    const std::uint64_t* a = g.row(j);
    const std::uint64_t* b = g.row(j + 1);
    const double y = bbox.lo.y() + (j + 1) * res;
    for (std::size_t k = 0; k < stride; ++k) {
      std::uint64_t diff = a[k] ^ b[k];
      const int base = static_cast<int>(k * 64);
      while (diff != 0) {
        const int i = base + std::countr_zero(diff);
        diff &= diff - 1;
        push(bbox.lo.x() + (i + 0.5) * res, y);
      }
    }
  }
  PointSet s(2, static_cast<Eigen::Index>(xs.size() / 2));
  std::copy(xs.begin(), xs.end(), s.data());
  return s;
}

} // namespace

Domain from_occupancy(std::string label, const Box& bbox, double resolution, OccupancyGrid occupancy)
{
  PointSet b = extract_boundary(bbox, resolution, occupancy);
  return Domain(std::move(label), bbox, resolution, std::move(occupancy), std::move(b));
}

PointSet boundary_samples(const Domain& d)
{
  PointSet s = extract_boundary(d.bbox(), d.resolution(), d.occupancy());
  if (s.cols() == 0)
    throw Error("no boundary");
  return s;
}

Domain complement(const Domain& d)
{
  OccupancyGrid g = d.occupancy();
  g.invert();
  return Domain(d.label(), d.bbox(), d.resolution(), std::move(g), d.boundary());
}

NearestBoundary nearest_boundary_point(const Domain& d, const Vec2& x)
{
  if (d.boundary().cols() == 0)
    throw Error("empty boundary");
  const auto hit = d.boundary_index().nearest(x);
  return {d.boundary().col(hit.index), std::sqrt(hit.dist2)};
}

double distance_to_complement(const Domain& d, const Vec2& x)
{
  if (!d.inside(x))
    return 0.0;
  if (d.boundary().cols() == 0)
    throw Error("empty boundary");
  return std::sqrt(d.boundary_index().nearest(x).dist2);
}

} // namespace reiflab
