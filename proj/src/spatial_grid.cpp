#include "fmp/spatial_grid.hpp"

#include <algorithm>
#include <cmath>

namespace fmp {

SpatialGrid::SpatialGrid(std::span<const VecD> points, double cell_size)
    : points_(points),
      cell_size_(cell_size),
      dim_(points.empty() ? 2 : points.front().dim()) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ConfigError("grid cell size must be finite and > 0");
  }
  entries_.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    entries_.push_back({cell_of(points[i]), i});
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.cell != b.cell ? a.cell < b.cell : a.index < b.index;
  });
}

SpatialGrid::Cell SpatialGrid::cell_of(const VecD& p) const {
  Cell c{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    c[static_cast<std::size_t>(k)] =
        static_cast<std::int64_t>(std::floor(p[k] / cell_size_));
  }
  return c;
}

std::pair<std::size_t, std::size_t> SpatialGrid::range_of(const Cell& c) const {
  const auto lo = std::lower_bound(
      entries_.begin(), entries_.end(), c,
      [](const Entry& e, const Cell& key) { return e.cell < key; });
  auto hi = lo;
  while (hi != entries_.end() && hi->cell == c) ++hi;
  return {static_cast<std::size_t>(lo - entries_.begin()),
          static_cast<std::size_t>(hi - entries_.begin())};
}

void SpatialGrid::candidates(const VecD& q, std::vector<std::size_t>& out) const {
  out.clear();
  const Cell home = cell_of(q);
  const int zr = dim_ == 3 ? 1 : 0;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -zr; dz <= zr; ++dz) {
        const auto [b, e] = range_of({home[0] + dx, home[1] + dy, home[2] + dz});
        for (std::size_t k = b; k < e; ++k) out.push_back(entries_[k].index);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

void SpatialGrid::within(const VecD& q, double radius, std::size_t self,
                         std::vector<std::size_t>& out) const {
  if (radius > cell_size_) {
    throw ConfigError("query radius exceeds grid cell size");
  }
  std::vector<std::size_t> cand;
  candidates(q, cand);
  out.clear();
  for (std::size_t j : cand) {
    if (j != self && distance(points_[j], q) < radius) out.push_back(j);
  }
}

}  // namespace fmp
