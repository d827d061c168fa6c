#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "exact.hpp"
#include "group.hpp"

namespace dspec {

inline constexpr std::size_t kMaxTorusDim = 8;

/// Point of the m-torus in 64-bit fixed point: coordinate k represents
/// k / 2^64. Rotations are exact integer additions, so they are exact
/// isometries of the circle metric.
struct TorusPoint {
  std::array<std::uint64_t, kMaxTorusDim> x{};
  std::uint8_t dim = 0;

  static std::uint64_t to_fixed(double v);
  static double to_double(std::uint64_t k) { return static_cast<double>(k >> 11) * 0x1.0p-53; }
  static TorusPoint from(std::span<const double> coords);
  std::vector<double> coords() const;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// Explicitly materialized symbols on a box [lo, lo + extent) of Z^d.
struct SubshiftWindow {
  GroupElement lo;
  std::vector<std::int64_t> extent;
  std::vector<std::uint8_t> symbols;  // row-major over the box

  bool covers(const GroupElement& c) const;
  std::uint8_t at(const GroupElement& c) const;
};

/// Point of A^G: symbols inside the window are explicit, all others are a
/// pure function of (seed, coordinate). `offset` accumulates the action:
/// the symbol at h is base(h + offset).
struct SubshiftPoint {
  std::uint64_t seed = 0;
  GroupElement offset;
  std::shared_ptr<const SubshiftWindow> window;
};

struct FinitePoint {
  std::uint32_t id = 0;
  friend bool operator==(const FinitePoint&, const FinitePoint&) = default;
};

using Point = std::variant<TorusPoint, SubshiftPoint, FinitePoint>;

enum class SpaceKind { torus, subshift, finite };

/// How w(x,y) is computed from per-point signatures. Every semimetric in the
/// library reduces to one of these kernels, so single evaluations and the
/// bulk orbit tables share one formula.
struct Kernel {
  enum class Kind {
    torus_max,          // max over coords of circle distance, fixed point
    torus_sum,          // sum over coords of circle distance, fixed point
    complex_abs,        // |a - b| for complex values (re, im) stored as doubles
    hamming,            // 1/2 sum_i |1_Ai(x) - 1_Ai(y)| from cell indices
    weighted_mismatch,  // sum_j w_j [a_j != b_j]
    weighted_max_mismatch,  // max_j w_j [a_j != b_j]
    matrix,             // D[a][b] lookup
  };
  Kind kind = Kind::torus_max;
  std::size_t width = 1;          // 64-bit words per signature
  std::vector<double> weights;    // weighted_mismatch, weighted_max_mismatch
  std::vector<double> matrix;     // matrix, row-major
  std::size_t matrix_size = 0;
  std::size_t cells = 0;          // hamming

  bool fixed_point() const { return kind == Kind::torus_max || kind == Kind::torus_sum; }
};

/// Orbit-average accumulator matching a kernel: fixed-point kernels sum exact
/// integers, the others sum doubles in enumeration order.
class KernelSum {
 public:
  explicit KernelSum(const Kernel& k) : kernel_(&k) {}
  void add(const std::uint64_t* a, const std::uint64_t* b);
  /// True once the partial sum certainly exceeds `bound * count`.
  bool exceeds(double bound, std::size_t count) const;
  double mean(std::size_t count) const;
  double single() const { return mean(1); }

 private:
  const Kernel* kernel_;
  unsigned __int128 fixed_ = 0;
  double real_ = 0.0;
};

double kernel_term(const Kernel& k, const std::uint64_t* a, const std::uint64_t* b);

using TestFunction = std::function<double(const Point&)>;

/// Compact metric space with a G-action, a base metric and an invariant
/// measure (seeded sampler or exact atoms).
class DynamicalSystem {
 public:
  explicit DynamicalSystem(GroupSpec group) : group_(std::move(group)) {}
  virtual ~DynamicalSystem() = default;

  const GroupSpec& group() const { return group_; }
  virtual SpaceKind space_kind() const = 0;
  virtual std::string describe() const = 0;

  virtual void validate(const Point& x) const = 0;
  virtual Point act(const GroupElement& g, const Point& x) const = 0;

  /// Base metric kernel and signatures. `sum_metric` selects the companion
  /// metric: the l1 sum over coordinates on tori, and on shifts (whose base
  /// metric is already a weighted sum) the weighted max over coordinates.
  /// Finite systems have none.
  virtual Kernel base_kernel(bool sum_metric) const = 0;
  virtual void base_signature(const Point& x, std::span<std::uint64_t> out) const = 0;
  double base_distance(const Point& x, const Point& y) const;
  virtual double diameter(bool sum_metric = false) const = 0;

  /// i.i.d. draws from mu; element i depends only on (seed, i).
  virtual std::vector<Point> sample(std::uint64_t seed, std::size_t count) const = 0;

  // exact measures (finite systems)
  virtual bool has_exact_measure() const { return false; }
  virtual std::size_t atom_count() const { return 0; }
  /// Integer weights; mu(atom i) = weight[i] / total.
  virtual const std::vector<std::int64_t>& atom_weights() const;
  virtual std::int64_t weight_total() const { return 0; }
  std::vector<Point> atoms() const;

  /// Test functions for the invariance diagnostic.
  virtual std::vector<TestFunction> test_functions() const = 0;

 private:
  GroupSpec group_;
};

/// Rotation x -> x + sum_j g_j alpha_j (mod 1) on the m-torus, Haar measure.
class TorusSystem final : public DynamicalSystem {
 public:
  TorusSystem(GroupSpec group, std::size_t dim, std::vector<std::vector<double>> rotations);

  SpaceKind space_kind() const override { return SpaceKind::torus; }
  std::string describe() const override;
  std::size_t dim() const { return dim_; }
  const std::vector<std::vector<double>>& rotations() const { return rotations_; }

  void validate(const Point& x) const override;
  Point act(const GroupElement& g, const Point& x) const override;
  Kernel base_kernel(bool sum_metric) const override;
  void base_signature(const Point& x, std::span<std::uint64_t> out) const override;
  double diameter(bool sum_metric = false) const override;
  std::vector<Point> sample(std::uint64_t seed, std::size_t count) const override;
  std::vector<TestFunction> test_functions() const override;

  Point point(std::span<const double> coords) const;
  Point point(std::initializer_list<double> coords) const {
    return point(std::span<const double>(coords.begin(), coords.size()));
  }

 private:
  std::size_t dim_;
  std::vector<std::vector<double>> rotations_;
  std::vector<std::vector<std::uint64_t>> fixed_rotations_;  // [generator][coord]
};

/// Shift on A^{Z^d}: (g x)(h) = x(h + g), with a Bernoulli product measure
/// (any d) or a stationary Markov measure (d = 1).
class SubshiftSystem final : public DynamicalSystem {
 public:
  struct Bernoulli {
    std::vector<double> probabilities;
  };
  struct Markov {
    std::vector<std::vector<double>> transition;
  };
  using Measure = std::variant<Bernoulli, Markov>;

  static constexpr std::int64_t kDefaultMetricRadius = 16;
  static constexpr std::int64_t kDefaultWindowRadius = 2048;

  SubshiftSystem(std::size_t dimension, std::size_t alphabet, Measure measure,
                 std::int64_t metric_radius = kDefaultMetricRadius,
                 std::int64_t window_radius = kDefaultWindowRadius);

  SpaceKind space_kind() const override { return SpaceKind::subshift; }
  std::string describe() const override;
  std::size_t alphabet() const { return alphabet_; }
  std::size_t dimension() const { return group().rank(); }
  const Measure& measure() const { return measure_; }
  std::int64_t metric_radius() const { return metric_radius_; }
  /// Coordinates with word length <= W, in lexicographic order, and their
  /// metric weights 2^-|h|.
  const std::vector<GroupElement>& metric_support() const { return support_; }
  /// Omitted tail weight sum_{|h| > W} 2^-|h| (infinite-sum truncation error bound).
  double truncation_error() const;

  void validate(const Point& x) const override;
  Point act(const GroupElement& g, const Point& x) const override;
  Kernel base_kernel(bool sum_metric) const override;
  void base_signature(const Point& x, std::span<std::uint64_t> out) const override;
  double diameter(bool sum_metric = false) const override;
  std::vector<Point> sample(std::uint64_t seed, std::size_t count) const override;
  std::vector<TestFunction> test_functions() const override;

  /// Symbol of x at coordinate h.
  std::uint8_t symbol(const Point& x, const GroupElement& h) const;
  /// Point with explicit symbols on [lo, lo+extent); other coordinates from seed.
  Point point(std::uint64_t seed, GroupElement lo, std::vector<std::int64_t> extent,
              std::vector<std::uint8_t> symbols) const;
  Point point(std::uint64_t seed) const;

 private:
  std::uint8_t generated_symbol(std::uint64_t seed, const GroupElement& c,
                                const SubshiftWindow* window) const;
  std::uint8_t draw(std::span<const double> cumulative, double u) const;

  std::size_t alphabet_;
  Measure measure_;
  std::int64_t metric_radius_;
  std::int64_t window_radius_;
  std::vector<GroupElement> support_;
  std::vector<double> support_weights_;
  std::vector<double> stationary_cdf_;
  std::vector<std::vector<double>> forward_cdf_;
  std::vector<std::vector<double>> backward_cdf_;
};

/// Permutation action on N atoms with an exact invariant probability vector.
class FiniteSystem final : public DynamicalSystem {
 public:
  /// permutations[i] is the image table of generator e_i.
  FiniteSystem(GroupSpec group, std::vector<std::vector<std::uint32_t>> permutations,
               std::vector<std::int64_t> weights, std::vector<std::vector<double>> distance);

  /// Discrete metric (distance 1 between distinct atoms).
  static std::vector<std::vector<double>> discrete_metric(std::size_t n);
  /// Circle metric min(|i-j|, n-|i-j|) / n, invariant under cyclic shifts.
  static std::vector<std::vector<double>> cyclic_metric(std::size_t n);

  SpaceKind space_kind() const override { return SpaceKind::finite; }
  std::string describe() const override;

  void validate(const Point& x) const override;
  Point act(const GroupElement& g, const Point& x) const override;
  std::uint32_t act(const GroupElement& g, std::uint32_t atom) const;
  Kernel base_kernel(bool sum_metric) const override;
  void base_signature(const Point& x, std::span<std::uint64_t> out) const override;
  double diameter(bool sum_metric = false) const override;
  std::vector<Point> sample(std::uint64_t seed, std::size_t count) const override;
  std::vector<TestFunction> test_functions() const override;

  bool has_exact_measure() const override { return true; }
  std::size_t atom_count() const override { return n_; }
  const std::vector<std::int64_t>& atom_weights() const override { return weights_; }
  std::int64_t weight_total() const override { return total_; }
  const std::vector<std::vector<double>>& distance() const { return distance_; }
  const std::vector<std::vector<std::uint32_t>>& permutations() const { return permutations_; }

 private:
  struct Cycles {
    std::vector<std::uint32_t> cycle_of, position;
    std::vector<std::vector<std::uint32_t>> cycles;
  };
  std::uint32_t power(std::size_t generator, std::int64_t k, std::uint32_t x) const;

  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> permutations_;
  std::vector<Cycles> cycles_;
  std::vector<std::int64_t> weights_;
  std::int64_t total_ = 0;
  std::vector<std::vector<double>> distance_;
};

/// max over test functions of |E f(gX) - E f(X)|; exact on finite systems.
double invariance_residual(const DynamicalSystem& sys, const GroupElement& g, std::uint64_t seed,
                           std::size_t count);

}  // namespace dspec
