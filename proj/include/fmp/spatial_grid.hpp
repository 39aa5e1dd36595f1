#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fmp/core.hpp"

namespace fmp {

/// Uniform grid over a point set, stored as (cell, index) pairs sorted by
/// cell. Any two points closer than cell_size lie in adjacent cells, so a
/// query over the 3^dim block around a cell returns a superset of every
/// neighbor within cell_size.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const VecD> points, double cell_size);

  double cell_size() const { return cell_size_; }
  std::size_t size() const { return entries_.size(); }

  /// Indices of all points in the block of cells around q, ascending.
  void candidates(const VecD& q, std::vector<std::size_t>& out) const;

  /// Indices j != self with |p_j - q| < radius, ascending. radius must not
  /// exceed cell_size.
  void within(const VecD& q, double radius, std::size_t self,
              std::vector<std::size_t>& out) const;

  /// Calls fn(i, j) once for every unordered pair i < j in adjacent cells.
  template <class Fn>
  void for_each_candidate_pair(Fn&& fn) const;

 private:
  using Cell = std::array<std::int64_t, 3>;
  struct Entry {
    Cell cell;
    std::size_t index;
  };

  Cell cell_of(const VecD& p) const;
  std::pair<std::size_t, std::size_t> range_of(const Cell& c) const;

  std::span<const VecD> points_;
  double cell_size_;
  int dim_;
  std::vector<Entry> entries_;
};

template <class Fn>
void SpatialGrid::for_each_candidate_pair(Fn&& fn) const {
  const int zr = dim_ == 3 ? 1 : 0;
  std::size_t begin = 0;
  while (begin < entries_.size()) {
    const Cell home = entries_[begin].cell;
    std::size_t end = begin;
    while (end < entries_.size() && entries_[end].cell == home) ++end;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -zr; dz <= zr; ++dz) {
          const Cell other{home[0] + dx, home[1] + dy, home[2] + dz};
          // Visit each cell pair once: same cell, or other > home.
          if (other < home) continue;
          const auto [ob, oe] = range_of(other);
          for (std::size_t a = begin; a < end; ++a) {
            for (std::size_t b = (other == home ? a + 1 : ob); b < oe; ++b) {
              const std::size_t i = entries_[a].index;
              const std::size_t j = entries_[b].index;
              fn(std::min(i, j), std::max(i, j));
            }
          }
        }
      }
    }
    begin = end;
  }
}

}  // namespace fmp
