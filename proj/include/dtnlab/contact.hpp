#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtnlab/errors.hpp"
#include "dtnlab/geometry.hpp"

namespace dtnlab {

struct ContactSnapshot {
  std::span<const Vec2> positions;
  double range = 0.0;  // R, m; two nodes are linked iff distance <= R
};

// Connected components of the distance-<=R contact graph. Labels are
// canonicalized to union-find root node ids, so equal inputs always produce
// identical labelings.
struct ClusterPartition {
  std::vector<std::int32_t> label;  // node id -> root node id
  std::vector<std::int32_t> sizes;  // indexed by root id; 0 for non-roots
  int node_count() const { return static_cast<int>(label.size()); }
};

// Estimated continuum-percolation bounds for the critical density, nodes/m^2.
struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Grid-accelerated cluster construction. Reusable: keeps its scratch arrays
// across calls so per-snapshot work stays allocation-free after warmup.
class ClusterBuilder {
 public:
  ClusterPartition build(const ContactSnapshot& snapshot);

  // Calls f(i, j) once for every unordered pair i < j with distance <= range.
  template <typename F>
  void for_each_contact_pair(const ContactSnapshot& snapshot, F&& f) {
    prepare_grid(snapshot);
    visit_pairs(snapshot, [&](std::int32_t i, std::int32_t j) { f(i, j); });
  }

 private:
  void prepare_grid(const ContactSnapshot& snapshot);

  template <typename F>
  void visit_pairs(const ContactSnapshot& snapshot, F&& f) {
    const double range_sq = snapshot.range * snapshot.range;
    const auto& pos = snapshot.positions;
    const int n = static_cast<int>(pos.size());
    for (int i = 0; i < n; ++i) {
      const int cx = cell_x_[i];
      const int cy = cell_y_[i];
      const int x_lo = cx > 0 ? cx - 1 : 0;
      const int x_hi = cx + 1 < nx_ ? cx + 1 : nx_ - 1;
      const int y_lo = cy > 0 ? cy - 1 : 0;
      const int y_hi = cy + 1 < ny_ ? cy + 1 : ny_ - 1;
      for (int gy = y_lo; gy <= y_hi; ++gy) {
        for (int gx = x_lo; gx <= x_hi; ++gx) {
          const int cell = gy * nx_ + gx;
          for (std::int32_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
          const std::int32_t j = ordered_[k];
            if (j <= i) continue;
            if (dist_sq(pos[i], pos[j]) <= range_sq) f(i, static_cast<int>(j));
          }
        }
      }
    }
  }

  int nx_ = 0, ny_ = 0;
  double min_x_ = 0.0, min_y_ = 0.0, inv_cell_ = 0.0;
  std::vector<std::int32_t> cell_x_, cell_y_;
  std::vector<std::int32_t> cell_start_;  // prefix offsets, size nx*ny+1
  std::vector<std::int32_t> ordered_;     // node ids sorted by cell
  std::vector<std::int32_t> parent_, rank_size_;
};

// One-shot convenience wrapper around ClusterBuilder::build.
ClusterPartition build_clusters(const ContactSnapshot& snapshot);

// Size of the cluster containing `source`. Throws InvalidNode for ids
// outside the partition.
std::int32_t source_cluster_size(const ClusterPartition& partition,
                                 std::int32_t source);

// Largest cluster size divided by node count, in [0,1].
double largest_cluster_fraction(const ClusterPartition& partition);

// Percolation critical-density bounds (1.43/R^2, 1.44/R^2) in nodes/m^2.
// Throws InvalidRange for non-positive range.
DensityBounds critical_density_bounds(double range);

}  // namespace dtnlab
