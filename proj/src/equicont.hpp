#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "complexity.hpp"
#include "folner.hpp"
#include "metrics.hpp"
#include "system.hpp"

namespace dspec {

/// Retained sample (or atom) subset of mass > 1 - tau.
struct Core {
  std::vector<Point> points;
  std::vector<std::size_t> indices;  // into the sample / atom list, ascending
  std::vector<std::int64_t> weight;
  std::int64_t total = 0;  // weight of the full sample / atom list
  double mass = 0.0;
  bool exact = false;
  double tau = 0.0;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
};

struct CoreOptions {
  std::size_t neighbors = 8;  // k of the oscillation score
  int workers = 1;
};

/// Sampled systems: drops the ceil(tau N) - 1 samples whose k nearest base
/// neighbours reach the largest mean distance w-bar_{F_score_n}. Exact
/// systems: drops the lightest atoms (larger score first among equal
/// weights) while the dropped mass stays below tau.
Core core_select(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t score_n,
                 std::uint64_t seed, std::size_t sample_count, double tau, const CoreOptions& opt = {});

enum class ModulusMode { limsup_proxy, all_n };
const char* to_string(ModulusMode m);

struct ModulusOptions {
  std::int64_t n0 = 0;                   // limsup window start; 0 means max(1, n_max / 4)
  std::size_t all_pairs_limit = 2000;    // all core pairs up to this core size
  std::size_t pair_samples = 2'000'000;  // seeded pairs beyond it
  std::uint64_t seed = 1;
  int workers = 1;
};

struct ModulusReport {
  ModulusMode mode = ModulusMode::limsup_proxy;
  std::string semimetric;
  std::vector<double> deltas;
  std::vector<std::optional<double>> modulus;  // absent: no pair with d < delta
  std::vector<double> base_sup;                // max d(x, y) over the same pairs
  std::vector<std::size_t> pairs_used;
  double core_mass = 0.0;
  std::int64_t n0 = 1;
  std::int64_t n_max = 1;
};

/// For each delta, the max over core pairs with d(x, y) < delta of the max
/// over n in the window of w-bar_{F_n}(x, y). The window is [n0, n_max] in
/// limsup_proxy mode (a proxy for the limsup, not the limsup) and [1, n_max]
/// in all_n mode. Deltas must be ascending.
ModulusReport equicontinuity_modulus(const DynamicalSystem& sys, const Semimetric& w, const Core& core,
                                     const FolnerSequence& seq, const std::vector<double>& deltas,
                                     std::int64_t n_max, ModulusMode mode, const ModulusOptions& opt = {});

inline ModulusReport mean_equicontinuity_modulus(const DynamicalSystem& sys, const Semimetric& w, const Core& core,
                                                 const FolnerSequence& seq, const std::vector<double>& deltas,
                                                 std::int64_t n_max, const ModulusOptions& opt = {}) {
  return equicontinuity_modulus(sys, w, core, seq, deltas, n_max, ModulusMode::limsup_proxy, opt);
}

inline ModulusReport equicont_in_mean_modulus(const DynamicalSystem& sys, const Semimetric& w, const Core& core,
                                              const FolnerSequence& seq, const std::vector<double>& deltas,
                                              std::int64_t n_max, const ModulusOptions& opt = {}) {
  return equicontinuity_modulus(sys, w, core, seq, deltas, n_max, ModulusMode::all_n, opt);
}

enum class ModulusClass { vanishing, floored, inconclusive };
const char* to_string(ModulusClass c);

/// vanishing: modulus(delta_min) < ratio * modulus(delta_max) (or the largest
/// modulus is 0); floored: otherwise; inconclusive when an entry is absent.
ModulusClass classify_modulus(const ModulusReport& rep, double ratio = 0.1);

struct EquicontSettings {
  std::vector<double> deltas;
  std::int64_t n_max = 256;
  double tau = 0.05;
  std::size_t sample_count = 2000;  // core selection and moduli
  std::uint64_t seed = 1;
  double vanishing_ratio = 0.1;
  std::int64_t tempered_check_limit = 64;
  ModulusOptions modulus;
  CoreOptions core;
  // complexity side
  std::vector<std::int64_t> n_grid;
  std::vector<double> eps_grid;
  std::size_t complexity_samples = 2000;
  ComplexityOptions complexity;
  BoundednessThresholds thresholds;
};

struct EquicontCrosscheck {
  Core core;
  ModulusReport limsup, all_n;
  ModulusClass limsup_class = ModulusClass::inconclusive;
  ModulusClass all_n_class = ModulusClass::inconclusive;
  std::optional<Ratio> tempered_constant;  // on [1, tempered_check_limit]
  ComplexityProfile profile;
  BoundednessReport boundedness;
  bool agree = false;
  bool conclusive_conflict = false;
  std::string reason;
};

/// Both moduli vanishing with bounded complexity, or both floored with
/// growing complexity, counts as agreement. Finite spaces are equicontinuous
/// and bounded.
EquicontCrosscheck equicontinuity_crosscheck(const DynamicalSystem& sys, const FolnerSequence& seq,
                                             const EquicontSettings& s);

}  // namespace dspec
