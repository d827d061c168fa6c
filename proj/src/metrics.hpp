#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "folner.hpp"
#include "system.hpp"

namespace dspec {

/// Bounded observable h: X -> C. Real observables have zero imaginary part.
struct Observable {
  std::string name;
  std::function<std::complex<double>(const Point&)> fn;

  std::complex<double> operator()(const Point& x) const { return fn(x); }

  static Observable constant(double c);
  /// exp(2 pi i <k, x>) on a torus.
  static Observable torus_character(std::vector<std::int64_t> k);
  /// sin(2 pi x_coord) on a torus.
  static Observable torus_sin(std::size_t coord = 0);
  /// 1[x(0) = symbol] on a subshift.
  static Observable origin_indicator(const SubshiftSystem& sys, std::uint8_t symbol = 1);
  /// values[atom] on a finite system.
  static Observable atom_values(std::vector<double> values);
};

/// max |h| over samples with 10% headroom.
double observable_bound(const DynamicalSystem& sys, const Observable& h, std::uint64_t seed, std::size_t count);

/// Finite partition given by membership predicates. Exactly one predicate
/// must fire on every evaluated point; labels are 1..l in predicate order.
class Partition {
 public:
  using Predicate = std::function<bool(const Point&)>;

  Partition(std::string name, std::vector<Predicate> cells);

  const std::string& name() const { return name_; }
  std::size_t size() const { return cells_.size(); }
  /// 0-based index of the unique cell containing x.
  std::size_t cell(const Point& x) const;
  std::size_t label(const Point& x) const { return cell(x) + 1; }

  /// {A, X \ A}.
  static Partition two_set(std::string name, Predicate a);
  /// Half-open intervals [c_j, c_{j+1}) of one torus coordinate cut at `cuts`.
  static Partition torus_intervals(std::vector<double> cuts, std::size_t coord = 0);
  /// Cells indexed by the symbols at the given coordinates (origin only by default).
  static Partition cylinder(const SubshiftSystem& sys, std::vector<GroupElement> coords = {});
  /// labels[atom] in 0..l-1.
  static Partition atom_labels(std::vector<std::size_t> labels);

 private:
  std::string name_;
  std::vector<Predicate> cells_;
};

/// w: one of the base metric d (or its l1 variant on tori), H(x,y) = |h(x) - h(y)|,
/// or the partition Hamming semimetric H^alpha.
class Semimetric {
 public:
  enum class Kind { base, base_sum, observable, partition_hamming };

  static Semimetric base() { return Semimetric(Kind::base); }
  static Semimetric base_sum() { return Semimetric(Kind::base_sum); }
  static Semimetric observable(Observable h);
  static Semimetric hamming(Partition alpha);

  Kind kind() const { return kind_; }
  const Observable& observable_fn() const { return *observable_; }
  const Partition& partition() const { return *partition_; }
  std::string describe() const;

  Kernel kernel(const DynamicalSystem& sys) const;
  /// Per-point data from which w(x, y) = kernel_term(sig(x), sig(y)).
  void signature(const DynamicalSystem& sys, const Point& x, std::span<std::uint64_t> out) const;
  /// Upper bound on w used for sanity checks.
  double bound(const DynamicalSystem& sys) const;

 private:
  explicit Semimetric(Kind k) : kind_(k) {}

  Kind kind_;
  std::shared_ptr<const Observable> observable_;
  std::shared_ptr<const Partition> partition_;
};

double eval_semimetric(const DynamicalSystem& sys, const Semimetric& w, const Point& x, const Point& y);

/// (1/|F_n|) sum_{g in F_n} w(gx, gy), summed in the enumeration order of F_n.
double mean_semimetric(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t n,
                       const Point& x, const Point& y);

/// Labels (1..l) of gx for g in F_n, in the enumeration order of F_n.
std::vector<std::size_t> alpha_name(const DynamicalSystem& sys, const Partition& alpha, const FolnerSequence& seq,
                                    std::int64_t n, const Point& x);

/// Name-disagreement fraction == mean partition Hamming distance, compared exactly.
bool hamming_identity_check(const DynamicalSystem& sys, const Partition& alpha, const FolnerSequence& seq,
                            std::int64_t n, const Point& x, const Point& y);

}  // namespace dspec
