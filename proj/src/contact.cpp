#include "dtnlab/contact.hpp"

#include <algorithm>
#include <cmath>

namespace dtnlab {
namespace {

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];  // path halving
    i = parent[i];
  }
  return i;
}

}  // namespace

void ClusterBuilder::prepare_grid(const ContactSnapshot& snapshot) {
  if (snapshot.range <= 0.0) throw InvalidRange("contact: range must be positive");
  const auto& pos = snapshot.positions;
  const int n = static_cast<int>(pos.size());
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  if (n > 0) {
    min_x = max_x = pos[0].x;
    min_y = max_y = pos[0].y;
    for (int i = 1; i < n; ++i) {
      min_x = std::min(min_x, pos[i].x);
      max_x = std::max(max_x, pos[i].x);
      min_y = std::min(min_y, pos[i].y);
      max_y = std::max(max_y, pos[i].y);
    }
  }
  min_x_ = min_x;
  min_y_ = min_y;
  inv_cell_ = 1.0 / snapshot.range;  // cell side == range
  nx_ = std::max(1, static_cast<int>((max_x - min_x) * inv_cell_) + 1);
  ny_ = std::max(1, static_cast<int>((max_y - min_y) * inv_cell_) + 1);

  cell_x_.resize(n);
  cell_y_.resize(n);
  cell_start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  ordered_.resize(n);
  for (int i = 0; i < n; ++i) {
    int cx = static_cast<int>((pos[i].x - min_x_) * inv_cell_);
    int cy = static_cast<int>((pos[i].y - min_y_) * inv_cell_);
    cx = std::clamp(cx, 0, nx_ - 1);
    cy = std::clamp(cy, 0, ny_ - 1);
    cell_x_[i] = cx;
    cell_y_[i] = cy;
    ++cell_start_[cy * nx_ + cx + 1];
  }
  for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];
  std::vector<std::int32_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
  for (int i = 0; i < n; ++i) {
    ordered_[cursor[cell_y_[i] * nx_ + cell_x_[i]]++] = i;
  }
}

ClusterPartition ClusterBuilder::build(const ContactSnapshot& snapshot) {
  prepare_grid(snapshot);
  const int n = static_cast<int>(snapshot.positions.size());
  parent_.resize(n);
  rank_size_.assign(n, 1);
  for (int i = 0; i < n; ++i) parent_[i] = i;

  visit_pairs(snapshot, [&](std::int32_t i, std::int32_t j) {
    std::int32_t ri = find_root(parent_, i);
    std::int32_t rj = find_root(parent_, j);
    if (ri == rj) return;
    if (rank_size_[ri] < rank_size_[rj]) std::swap(ri, rj);
    parent_[rj] = ri;
    rank_size_[ri] += rank_size_[rj];
  });

  ClusterPartition partition;
  partition.label.resize(n);
  partition.sizes.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const std::int32_t root = find_root(parent_, i);
    partition.label[i] = root;
    ++partition.sizes[root];
  }
  return partition;
}

ClusterPartition build_clusters(const ContactSnapshot& snapshot) {
  ClusterBuilder builder;
  return builder.build(snapshot);
}

std::int32_t source_cluster_size(const ClusterPartition& partition,
                                 std::int32_t source) {
  if (source < 0 || source >= partition.node_count()) {
    throw InvalidNode("contact: node id out of range");
  }
  return partition.sizes[partition.label[source]];
}

double largest_cluster_fraction(const ClusterPartition& partition) {
  const int n = partition.node_count();
  if (n < 1) throw InvalidInput("contact: partition is empty");
  const std::int32_t largest =
      *std::max_element(partition.sizes.begin(), partition.sizes.end());
  return static_cast<double>(largest) / static_cast<double>(n);
}

DensityBounds critical_density_bounds(double range) {
  if (range <= 0.0) throw InvalidRange("contact: range must be positive");
  const double r_sq = range * range;
  return DensityBounds{1.43 / r_sq, 1.44 / r_sq};
}

}  // namespace dtnlab
