#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "folner.hpp"
#include "metrics.hpp"
#include "system.hpp"

namespace dspec {

/// Signatures of g x_i for every point x_i and every g in F (enumeration
/// order), so that mean semimetrics between table points are pure array
/// scans. Sums run in the same order as mean_semimetric, so values agree
/// bit for bit.
class OrbitTable {
 public:
  static constexpr std::size_t kDefaultMemoryBudget = std::size_t{3} << 30;

  OrbitTable(const DynamicalSystem& sys, const Semimetric& w, const FolnerSet& F, std::span<const Point> points,
             int workers, std::size_t memory_budget = kDefaultMemoryBudget);

  std::size_t size() const { return count_; }
  std::size_t orbit_length() const { return length_; }
  const Kernel& kernel() const { return kernel_; }

  double distance(std::size_t i, std::size_t j) const;
  /// The mean distance if it is < cutoff, otherwise +infinity. Stops early
  /// once the partial sum certainly exceeds the cutoff.
  double distance_below(std::size_t i, std::size_t j, double cutoff) const;

  /// Running means over the first m orbit elements for every m in `prefixes`
  /// (ascending, each <= orbit_length). Used for nested Følner sets.
  void prefix_distances(std::size_t i, std::size_t j, std::span<const std::size_t> prefixes,
                        std::span<double> out) const;

 private:
  const std::uint64_t* row(std::size_t i) const { return sig_.data() + i * length_ * width_; }

  Kernel kernel_;
  std::size_t count_ = 0;
  std::size_t length_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint64_t> sig_;
};

/// Symmetric radius graph: for each point, the points at mean distance
/// < radius (itself included), ascending by index, with their distances.
struct NeighborGraph {
  double radius = 0.0;
  std::vector<std::size_t> offset;
  std::vector<std::uint32_t> target;
  std::vector<double> dist;

  std::size_t size() const { return offset.empty() ? 0 : offset.size() - 1; }
  std::size_t degree(std::size_t i) const { return offset[i + 1] - offset[i]; }
  /// CSR of neighbors at distance < r (r <= radius).
  void ball_lists(double r, std::vector<std::size_t>& off, std::vector<std::uint32_t>& items) const;
};

inline constexpr std::size_t kPivotCount = 8;

NeighborGraph build_neighbor_graph(const OrbitTable& table, double radius, int workers);

}  // namespace dspec
