#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "complexity.hpp"
#include "cyclotomic.hpp"
#include "metrics.hpp"
#include "system.hpp"

namespace dspec {

struct L2Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t sample_count = 0;
};

/// sqrt(mean |h1 - h2|^2) over seeded samples, with a delta-method standard error.
L2Estimate l2_distance(const DynamicalSystem& sys, const Observable& h1, const Observable& h2, std::uint64_t seed,
                       std::size_t sample_count);

/// x -> h(g x). The system must outlive the result.
Observable compose(const DynamicalSystem& sys, const Observable& h, const GroupElement& g);

/// h(g_i x_s) for the elements of a word ball (rows, in (word length, lex)
/// order) and one shared block of samples (columns).
struct OrbitSamples {
  std::vector<GroupElement> elements;
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;
  std::uint64_t seed = 0;

  std::size_t sample_count() const { return static_cast<std::size_t>(values.cols()); }
  /// Monte Carlo L2 distance between rows i and j on the common samples.
  double distance(std::size_t i, std::size_t j) const;
};

inline constexpr std::size_t kDefaultBallBudget = 100'000;

OrbitSamples orbit_samples(const DynamicalSystem& sys, const Observable& h, std::int64_t radius, std::uint64_t seed,
                           std::size_t sample_count, int workers = 1, std::size_t ball_budget = kDefaultBallBudget);

/// First-fit eps-net of the orbit rows: a row joins the net unless it lies
/// within distance < eps of an earlier member. Returns member row indices.
/// Since balls are prefixes of the row order, net(r) is a prefix of net(r')
/// for r <= r'.
std::vector<std::size_t> orbit_net(const OrbitSamples& orbit, double epsilon);

std::size_t orbit_net_size(const DynamicalSystem& sys, const Observable& h, std::int64_t radius, double epsilon,
                           std::uint64_t seed, std::size_t sample_count, int workers = 1);

struct L2OrbitGram {
  std::vector<GroupElement> elements;
  Eigen::MatrixXcd gram;  // <h o g_i, h o g_j> on common samples
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  double diag_min = 0.0, diag_max = 0.0;
  double diag_std_error = 0.0;  // largest per-entry standard error on the diagonal
};

L2OrbitGram orbit_gram(const OrbitSamples& orbit);

/// Eigenvalues above tol * max. Eigenvalues below -psd_tol * max raise a
/// numerical error.
std::size_t gram_effective_rank(const L2OrbitGram& gram, double tol, double psd_tol = 1e-9);

enum class ApVerdict { precompact_consistent, growing, inconclusive };
const char* to_string(ApVerdict v);

struct ApOptions {
  std::vector<std::int64_t> radii{16, 64, 256, 512};
  std::vector<double> epsilon_factors{0.1, 0.05};  // times the estimated ||h||_2
  std::size_t sample_count = 1024;
  std::uint64_t seed = 1;
  int workers = 1;
  double stable_fraction = 0.1;  // last step adds at most max(1, this * previous)
  double growth_factor = 1.5;    // last step multiplies by at least this
};

struct ApReport {
  std::string observable;
  std::vector<std::int64_t> radii;
  std::vector<std::size_t> ball_sizes;
  std::vector<double> epsilons;
  std::vector<std::vector<std::size_t>> net_sizes;  // [epsilon][radius]
  double norm = 0.0;
  ApVerdict verdict = ApVerdict::inconclusive;
  std::string reason;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
};

/// Heuristic reading of orbit nets over growing balls: precompact-consistent
/// when the last radius step adds almost nothing at every eps, growing when it
/// multiplies the net at some eps.
ApReport ap_test(const DynamicalSystem& sys, const Observable& h, const ApOptions& opt = {});

struct ApCrosscheck {
  ApReport ap;
  ComplexityProfile profile;
  BoundednessReport boundedness;
  bool agree = false;              // precompact with bounded, or growing with growing
  bool conclusive_conflict = false;
};

ApCrosscheck ap_vs_complexity_crosscheck(const DynamicalSystem& sys, const Observable& h, const FolnerSequence& seq,
                                         const std::vector<std::int64_t>& n_grid, const std::vector<double>& eps_grid,
                                         std::size_t sample_count, const ApOptions& ap = {},
                                         const ComplexityOptions& copt = {}, const BoundednessThresholds& t = {});

struct LemmaMeanResult {
  bool hypothesis = false;  // |h| <= C, integral zero, k > 1, double integral < 1/k^2
  bool holds = true;        // conclusion; true when the hypothesis fails (vacuous)
  Rational integral_abs;    // integral of |h|
  Rational double_integral;
  Rational bound;           // (2 + C)/k + C/(k - 1)
  Rational slack;           // bound - integral_abs
  std::string reason;
};

/// Mean bound for a bounded mean-zero observable with small average
/// oscillation, evaluated exactly on a finite system.
LemmaMeanResult lemma_mean_bound_check(const FiniteSystem& sys, const std::vector<Rational>& h, const Rational& C,
                                       const Rational& k);

/// Unnormalized character functions of a finite abelian action with exponent
/// dividing 8: one vector per (orbit, character trivial on the stabilizer),
/// equal to chi(g) at g x_O on the orbit and 0 elsewhere. Values are 8th roots
/// of unity, so differences have exact moduli.
std::vector<std::vector<Cyclotomic16>> character_basis(const FiniteSystem& sys);

struct BasisBoundResult {
  bool holds = true;
  std::size_t triples = 0;   // (g, x, y) checked
  std::size_t equalities = 0;  // triples with equality
  std::string witness;         // first violating triple, if any
};

/// |f(gx) - f(gy)| <= ||f||_2 sum_i |e_i(x) - e_i(y)| for every g and every
/// atom pair, where e_i = basis_i / ||basis_i||_2. The basis must be
/// orthogonal with equal norms, take values in {0} and the 8th roots of unity,
/// and span an invariant subspace containing f.
BasisBoundResult basis_bound_check(const FiniteSystem& sys, const std::vector<std::vector<Cyclotomic16>>& basis,
                                   const std::vector<Cyclotomic16>& f);

}  // namespace dspec
