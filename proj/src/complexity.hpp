#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cover_solver.hpp"
#include "exact.hpp"
#include "folner.hpp"
#include "metrics.hpp"
#include "orbit_table.hpp"
#include "system.hpp"

namespace dspec {

enum class CoverMode { greedy_upper, exact, packing_lower };
const char* to_string(CoverMode m);

struct CoveringResult {
  CoverMode mode = CoverMode::greedy_upper;
  std::int64_t n = 0;
  double epsilon = 0.0;
  std::vector<Point> centers;
  std::vector<std::size_t> center_indices;  // into the sample / atom list
  std::size_t count = 0;
  double covered_mass = 0.0;  // empirical fraction, or exact mass on finite systems
  bool exact_measure = false;  // centers and mass taken from exact atoms
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

struct ComplexityOptions {
  int workers = 1;
  std::size_t atom_budget = 20;  // complexity_exact
  std::size_t word_length_budget = 22;  // complexity_words_exact
  std::size_t incidence_budget = 100'000'000;  // explicit ball-incidence entries
  ExactCoverOptions cover;
};

/// Points carrying the measure: exact atoms with integer weights on finite
/// systems, otherwise seeded samples of weight 1.
struct WeightedPoints {
  std::vector<Point> points;
  std::vector<std::int64_t> weight;
  std::int64_t total = 0;
  bool exact = false;
};
WeightedPoints measure_points(const DynamicalSystem& sys, std::uint64_t seed, std::size_t sample_count);

/// Greedy cover by open eps/2 balls of w-bar_{F_n} until mass > 1 - eps.
CoveringResult complexity_greedy_upper(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq,
                                       std::int64_t n, double epsilon, std::uint64_t seed, std::size_t sample_count,
                                       const ComplexityOptions& opt = {});

/// Exact C(w-bar_{F_n}, eps) on a finite system with exact measure.
std::size_t complexity_exact(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq,
                             std::int64_t n, double epsilon, const ComplexityOptions& opt = {});

/// Exact C(H-bar^alpha_{F_n}, eps) for the origin partition of the binary
/// Bernoulli(p) shift, solved on the word space {0,1}^{F_n}.
std::size_t complexity_words_exact(Ratio p, const FolnerSequence& seq, std::int64_t n, double epsilon,
                                   const ComplexityOptions& opt = {});

struct PackingResult {
  std::size_t count = 0;
  std::size_t separated = 0;  // size of the eps-separated set
  bool rigorous = false;      // true: certified lower bound for C (exact measure)
};

/// eps-separated set of a (1 - eps)-mass core. On exact systems the result is
/// a certified lower bound max(1, |P| - j) where j counts the lightest members
/// of P whose total mass stays below eps; on sampled systems it is a witness.
PackingResult packing_lower(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t n,
                            double epsilon, std::uint64_t seed, std::size_t sample_count,
                            const ComplexityOptions& opt = {});

struct ProfileRow {
  std::int64_t n = 0;
  std::size_t folner_size = 0;
  double epsilon = 0.0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  std::optional<std::size_t> exact;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool lower_rigorous = false;
  double runtime_ms = 0.0;
};

struct ComplexityProfile {
  std::string system;
  std::string semimetric;
  bool finite_space = false;
  std::size_t atom_count = 0;
  std::vector<ProfileRow> rows;  // n-major, eps ascending within n
};

ComplexityProfile complexity_profile(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq,
                                     const std::vector<std::int64_t>& n_grid, const std::vector<double>& eps_grid,
                                     std::uint64_t seed, std::size_t sample_count, const ComplexityOptions& opt = {});

enum class Verdict { bounded, growing, inconclusive };
const char* to_string(Verdict v);

struct BoundednessThresholds {
  double band = 1.5;      // bounded: max/min <= band
  double slope = 0.2;     // growing: slope of log C vs log |F_n| above this
  std::size_t min_points = 5;
};

struct EpsilonFit {
  double epsilon = 0.0;
  std::size_t points = 0;
  double ratio = 0.0;  // max/min of the values
  double slope = 0.0;
  bool lower_confirms = false;
  Verdict verdict = Verdict::inconclusive;
};

struct BoundednessReport {
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  BoundednessThresholds thresholds;
  std::vector<EpsilonFit> fits;
};

/// Per eps: bounded when max/min <= band; growing when the log-log slope
/// exceeds the threshold and the lower bound at the largest n exceeds the
/// upper bound at the smallest n; otherwise inconclusive. Overall: growing if
/// any eps grows, bounded if all are bounded. Finite state spaces are bounded.
BoundednessReport boundedness_diagnostic(const ComplexityProfile& profile, const BoundednessThresholds& t = {});

struct CellDecomposition {
  std::vector<std::vector<std::size_t>> cells;  // atom ids
  double mass = 0.0;
  std::int64_t weight = 0;
  std::int64_t total = 0;
};

/// Cells of mass > 1 - eps with sup over the given n of in-cell w-bar_{F_n}
/// diameter < eps, using at most cell_budget cells; nullopt when the minimum
/// number of cells exceeds the budget.
std::optional<CellDecomposition> uniform_cell_check(const DynamicalSystem& sys, const Semimetric& w,
                                                    const FolnerSequence& seq, double epsilon,
                                                    const std::vector<std::int64_t>& n_values,
                                                    std::size_t cell_budget, const ComplexityOptions& opt = {});

struct RobustnessReport {
  std::vector<std::string> semimetrics;
  std::vector<BoundednessReport> reports;
  std::vector<ComplexityProfile> profiles;
  bool agree = false;             // all verdicts equal and conclusive
  bool conclusive_conflict = false;  // both bounded and growing present
  std::uint64_t seed = 0;
};

RobustnessReport metric_robustness_check(const DynamicalSystem& sys, const FolnerSequence& seq,
                                         const std::vector<Semimetric>& metrics, const std::vector<std::int64_t>& n_grid,
                                         const std::vector<double>& eps_grid, std::uint64_t seed,
                                         std::size_t sample_count, const ComplexityOptions& opt = {},
                                         const BoundednessThresholds& t = {});

}  // namespace dspec
