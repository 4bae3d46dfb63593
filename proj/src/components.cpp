#include "reiflab/components.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace reiflab {

ComponentReport components(const Domain& d)
{
  const int w = d.width(), h = d.height();
  if (d.occupancy().count() == 0)
    throw Error("empty domain");
  const std::size_t n = d.occupancy().cell_count();
  std::vector<int> label(n, -1);
  std::vector<std::size_t> first_cell, sizes;
  std::vector<std::size_t> stack;
  auto idx = [w](int i, int j) { return static_cast<std::size_t>(j) * static_cast<std::size_t>(w) + static_cast<std::size_t>(i); };
  int count = 0;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      if (!d.inside(i, j) || label[idx(i, j)] >= 0)
        continue;
      std::size_t size = 0;
      label[idx(i, j)] = count;
      stack.push_back(idx(i, j));
      while (!stack.empty()) {
        const std::size_t k = stack.back();
        stack.pop_back();
        ++size;
        const int ci = static_cast<int>(k % static_cast<std::size_t>(w));
        const int cj = static_cast<int>(k / static_cast<std::size_t>(w));
        const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
        for (int t = 0; t < 4; ++t) {
          const int ni = ci + di[t], nj = cj + dj[t];
          if (ni < 0 || nj < 0 || ni >= w || nj >= h || !d.inside(ni, nj) || label[idx(ni, nj)] >= 0)
            continue;
          label[idx(ni, nj)] = count;
          stack.push_back(idx(ni, nj));
        }
      }
      first_cell.push_back(idx(i, j));
      sizes.push_back(size);
      ++count;
    }

  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto sa = sizes[static_cast<std::size_t>(a)], sb = sizes[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : first_cell[static_cast<std::size_t>(a)] < first_cell[static_cast<std::size_t>(b)];
  });

  ComponentReport rep;
  rep.n = static_cast<std::size_t>(count);
  std::vector<int> rank(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r)
    rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
  std::vector<OccupancyGrid> masks(static_cast<std::size_t>(count), OccupancyGrid(w, h));
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      if (const int l = label[idx(i, j)]; l >= 0)
        masks[static_cast<std::size_t>(rank[static_cast<std::size_t>(l)])].set(i, j, true);
  for (int r = 0; r < count; ++r) {
    const std::string name = d.label() + "#" + std::to_string(r);
    rep.components.push_back(from_occupancy(name, d.bbox(), d.resolution(), std::move(masks[static_cast<std::size_t>(r)])));
    rep.areas.push_back(rep.components.back().area());
    rep.clipped = rep.clipped || rep.components.back().touches_bbox();
  }

  rep.min_pairwise_separation = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < rep.n; ++a)
    for (std::size_t b = a + 1; b < rep.n; ++b) {
      const PointSet& pb = rep.components[b].boundary();
      for (Eigen::Index k = 0; k < pb.cols(); ++k) {
        const auto hit = rep.components[a].boundary_index().nearest(pb.col(k));
        const double dist = std::sqrt(hit.dist2);
        if (dist < rep.min_pairwise_separation) {
          rep.min_pairwise_separation = dist;
          rep.separation_witness = {rep.components[a].boundary().col(hit.index), pb.col(k)};
        }
      }
    }
  return rep;
}

double component_count_bound(double area, double r0)
{
  return 400.0 / std::numbers::pi * area / (r0 * r0);
}

CountCheck check_count_bound(const ComponentReport& rep, double r0)
{
  if (!(r0 > 0))
    throw Error("r0 must be positive");
  CountCheck c;
  c.n = rep.n;
  c.bound = component_count_bound(std::accumulate(rep.areas.begin(), rep.areas.end(), 0.0), r0);
  if (rep.clipped) {
    c.status = CheckStatus::Inapplicable;
    c.reason = "clipped: bound not asserted";
    return c;
  }
  c.status = static_cast<double>(c.n) <= c.bound ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

SeparationBoundCheck check_separation_bound(const ComponentReport& rep, double resolution, double r0)
{
  if (!(r0 > 0))
    throw Error("r0 must be positive");
  SeparationBoundCheck c;
  c.separation = rep.min_pairwise_separation;
  c.bound = r0 / 70;
  c.margin = resolution * std::numbers::sqrt2;
  c.witness = rep.separation_witness;
  if (rep.n < 2) {
    c.status = CheckStatus::Vacuous;
    c.reason = "fewer than two components";
    return c;
  }
  if (rep.clipped) {
    c.status = CheckStatus::Inapplicable;
    c.reason = "clipped: bound not asserted";
    return c;
  }
  c.status = c.separation > c.bound - c.margin ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

namespace {

std::optional<std::string> certification_gap(const Domain& d, double r0, std::optional<double> eps,
                                             const CheckOptions& opts)
{
  if (!eps || !opts.certify)
    return std::nullopt;
  const Certificate cert = certify(d, *eps, r0, opts.n_scales, opts.flatness);
  if (cert.certified)
    return std::nullopt;
  return "hypothesis not met: " + cert.reason;
}

} // namespace

CountCheck check_count_bound(const Domain& d, double r0, std::optional<double> eps, const CheckOptions& opts)
{
  if (auto gap = certification_gap(d, r0, eps, opts)) {
    CountCheck c;
    c.n = components(d).n;
    c.bound = component_count_bound(d.area(), r0);
    c.status = CheckStatus::Inapplicable;
    c.reason = *gap;
    return c;
  }
  return check_count_bound(components(d), r0);
}

SeparationBoundCheck check_separation_bound(const Domain& d, double r0, std::optional<double> eps,
                                            const CheckOptions& opts)
{
  const ComponentReport rep = components(d);
  SeparationBoundCheck c = check_separation_bound(rep, d.resolution(), r0);
  if (c.status == CheckStatus::Vacuous)
    return c;
  if (auto gap = certification_gap(d, r0, eps, opts)) {
    c.status = CheckStatus::Inapplicable;
    c.reason = *gap;
  }
  return c;
}

} // namespace reiflab
