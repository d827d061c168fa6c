#include "orbit_table.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace dspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 64;

std::uint64_t circle(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t d = a - b;
  return std::min(d, std::uint64_t{0} - d);
}

// Largest partial fixed-point sum still compatible with mean < cutoff.
unsigned __int128 fixed_ceiling(double cutoff, std::size_t length) {
  const double t = cutoff * static_cast<double>(length) * 0x1.0p64 * (1.0 + 1e-9) + 1.0;
  if (!(t < 0x1.0p126)) return ~static_cast<unsigned __int128>(0);
  return static_cast<unsigned __int128>(t);
}

}  // namespace

OrbitTable::OrbitTable(const DynamicalSystem& sys, const Semimetric& w, const FolnerSet& F,
                       std::span<const Point> points, int workers, std::size_t memory_budget)
    : kernel_(w.kernel(sys)), count_(points.size()), length_(F.size()), width_(kernel_.width) {
  const double bytes = static_cast<double>(count_) * static_cast<double>(length_) * static_cast<double>(width_) * 8.0;
  require(bytes <= static_cast<double>(memory_budget), ErrorKind::resource,
          "orbit table exceeds memory budget (" + std::to_string(count_) + " points x " + std::to_string(length_) +
              " group elements)");
  sig_.assign(count_ * length_ * width_, 0);
  parallel_for(count_, workers, [&](std::size_t i) {
    sys.validate(points[i]);
    std::uint64_t* out = sig_.data() + i * length_ * width_;
    for (std::size_t g = 0; g < length_; ++g)
      w.signature(sys, sys.act(F[g], points[i]), std::span<std::uint64_t>(out + g * width_, width_));
  });
}

double OrbitTable::distance(std::size_t i, std::size_t j) const {
  const std::uint64_t *a = row(i), *b = row(j);
  KernelSum sum(kernel_);
  for (std::size_t g = 0; g < length_; ++g) sum.add(a + g * width_, b + g * width_);
  return sum.mean(length_);
}

double OrbitTable::distance_below(std::size_t i, std::size_t j, double cutoff) const {
  const std::uint64_t *a = row(i), *b = row(j);
  if (kernel_.kind == Kernel::Kind::torus_max && width_ == 1) {
    // hot path: circle rotations
    const unsigned __int128 ceiling = fixed_ceiling(cutoff, length_);
    unsigned __int128 s = 0;
    for (std::size_t g0 = 0; g0 < length_; g0 += kBlock) {
      const std::size_t g1 = std::min(length_, g0 + kBlock);
      for (std::size_t g = g0; g < g1; ++g) s += circle(a[g], b[g]);
      if (s > ceiling) return kInf;
    }
    // same rounding as KernelSum::mean
    const unsigned __int128 q = s / length_, r = s % length_;
    const double mean =
        (static_cast<double>(q) + static_cast<double>(r) / static_cast<double>(length_)) * 0x1.0p-64;
    return mean < cutoff ? mean : kInf;
  }
  KernelSum sum(kernel_);
  for (std::size_t g0 = 0; g0 < length_; g0 += kBlock) {
    const std::size_t g1 = std::min(length_, g0 + kBlock);
    for (std::size_t g = g0; g < g1; ++g) sum.add(a + g * width_, b + g * width_);
    if (sum.exceeds(cutoff, length_)) return kInf;
  }
  const double mean = sum.mean(length_);
  return mean < cutoff ? mean : kInf;
}

void OrbitTable::prefix_distances(std::size_t i, std::size_t j, std::span<const std::size_t> prefixes,
                                  std::span<double> out) const {
  const std::uint64_t *a = row(i), *b = row(j);
  KernelSum sum(kernel_);
  std::size_t g = 0;
  for (std::size_t k = 0; k < prefixes.size(); ++k) {
    require(prefixes[k] >= 1 && prefixes[k] <= length_ && (k == 0 || prefixes[k] >= prefixes[k - 1]),
            ErrorKind::input, "prefix lengths must be ascending and within the orbit");
    for (; g < prefixes[k]; ++g) sum.add(a + g * width_, b + g * width_);
    out[k] = sum.mean(prefixes[k]);
  }
}

void NeighborGraph::ball_lists(double r, std::vector<std::size_t>& off, std::vector<std::uint32_t>& items) const {
  require(r <= radius, ErrorKind::input, "ball radius exceeds graph radius");
  off.assign(1, 0);
  items.clear();
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t e = offset[i]; e < offset[i + 1]; ++e)
      if (dist[e] < r) items.push_back(target[e]);
    off.push_back(items.size());
  }
}

NeighborGraph build_neighbor_graph(const OrbitTable& table, double radius, int workers) {
  require(radius > 0.0, ErrorKind::input, "graph radius must be positive");
  const std::size_t N = table.size();
  require(N < (std::size_t{1} << 32), ErrorKind::resource, "too many points for the neighbor graph");

  // farthest-first pivots; their exact distance rows give triangle lower bounds
  const std::size_t P = std::min(kPivotCount, N);
  std::vector<double> piv(N * P, 0.0);
  std::vector<double> nearest(N, kInf);
  std::size_t next = 0;
  for (std::size_t p = 0; p < P; ++p) {
    const std::size_t c = next;
    std::vector<double> col(N);
    parallel_for(N, workers, [&](std::size_t i) { col[i] = table.distance(c, i); });
    for (std::size_t i = 0; i < N; ++i) {
      piv[i * P + p] = col[i];
      nearest[i] = std::min(nearest[i], col[i]);
    }
    next = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
  }
  const double skip = radius * (1.0 + 1e-9) + 1e-12;

  std::vector<std::vector<std::pair<std::uint32_t, double>>> upper(N);
  parallel_for(N, workers, [&](std::size_t i) {
    const double* pi = piv.data() + i * P;
    auto& out = upper[i];
    for (std::size_t j = i + 1; j < N; ++j) {
      const double* pj = piv.data() + j * P;
      double lb = 0.0;
      for (std::size_t p = 0; p < P; ++p) lb = std::max(lb, std::abs(pi[p] - pj[p]));
      if (lb >= skip) continue;
      const double d = table.distance_below(i, j, radius);
      if (d < radius) out.emplace_back(static_cast<std::uint32_t>(j), d);
    }
  });

  NeighborGraph G;
  G.radius = radius;
  std::vector<std::size_t> deg(N, 1);
  for (std::size_t i = 0; i < N; ++i) {
    deg[i] += upper[i].size();
    for (const auto& [j, d] : upper[i]) ++deg[j];
  }
  G.offset.assign(N + 1, 0);
  for (std::size_t i = 0; i < N; ++i) G.offset[i + 1] = G.offset[i] + deg[i];
  G.target.resize(G.offset[N]);
  G.dist.resize(G.offset[N]);
  std::vector<std::size_t> fill(G.offset.begin(), G.offset.end() - 1);
  // rows are visited in ascending i, so lower neighbors arrive sorted
  for (std::size_t i = 0; i < N; ++i) {
    G.target[fill[i]] = static_cast<std::uint32_t>(i);
    G.dist[fill[i]++] = 0.0;
    for (const auto& [j, d] : upper[i]) {
      G.target[fill[i]] = j;
      G.dist[fill[i]++] = d;
      G.target[fill[j]] = static_cast<std::uint32_t>(i);
      G.dist[fill[j]++] = d;
    }
    std::vector<std::pair<std::uint32_t, double>>().swap(upper[i]);
  }
  return G;
}

}  // namespace dspec
