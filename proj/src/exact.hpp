#pragma once

// Exact comparisons between integer quantities and user thresholds. A
// threshold double is read as the shortest decimal that round-trips to it
// (0.4 means 4/10, not the binary value just above it), and every strict
// inequality between counts and thresholds is decided exactly on that
// rational.

#include <compare>
#include <cstdint>
#include <string>

namespace dspec {

/// sign(a - b*x) computed exactly, x read as its shortest decimal.
std::strong_ordering compare_scaled(std::int64_t a, std::int64_t b, double x);

/// Largest integer u >= -1 with u < total * fraction (exact). Used as the
/// admissible uncovered weight when covered mass must exceed 1 - fraction.
std::int64_t max_integer_below(std::int64_t total, double fraction);

/// Exact nonnegative ratio of two counts, kept unreduced as produced.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }
};

/// num/den <= c, exact.
inline bool ratio_le(const Ratio& r, double c) {
  return compare_scaled(r.num, r.den, c) != std::strong_ordering::greater;
}

}  // namespace dspec
