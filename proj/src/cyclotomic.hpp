#pragma once

// Exact arithmetic in Q(zeta), zeta = exp(2 pi i / 16). Elements are
// a_0 + a_1 zeta + ... + a_7 zeta^7 with rational a_m; zeta^8 = -1 and
// x^8 + 1 is irreducible, so the representation is unique. Holds the values
// of characters of groups of exponent dividing 8 together with the moduli
// |1 - zeta^(2k)| = 2 |sin(pi k / 8)| of their differences.

#include <array>
#include <complex>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dspec {

using Rational = boost::multiprecision::cpp_rational;

class Cyclotomic16 {
 public:
  Cyclotomic16() = default;
  Cyclotomic16(const Rational& q) { c_[0] = q; }  // NOLINT: rationals embed
  Cyclotomic16(long long q) { c_[0] = q; }        // NOLINT

  /// zeta^m for any integer m.
  static Cyclotomic16 zeta(long long m);
  static Cyclotomic16 gaussian(const Rational& re, const Rational& im);

  const Rational& coeff(std::size_t m) const { return c_[m]; }

  Cyclotomic16 conj() const;
  /// |z|^2 = z * conj(z), a real element.
  Cyclotomic16 norm2() const { return *this * conj(); }
  bool is_zero() const;
  bool is_real() const { return *this == conj(); }
  /// Sign of a real element, decided exactly for zero and by a certified
  /// high-precision evaluation otherwise.
  int real_sign() const;

  std::complex<double> approx() const;
  std::string str() const;

  friend Cyclotomic16 operator+(Cyclotomic16 a, const Cyclotomic16& b);
  friend Cyclotomic16 operator-(Cyclotomic16 a, const Cyclotomic16& b);
  friend Cyclotomic16 operator-(Cyclotomic16 a);
  friend Cyclotomic16 operator*(const Cyclotomic16& a, const Cyclotomic16& b);
  friend bool operator==(const Cyclotomic16& a, const Cyclotomic16& b) { return a.c_ == b.c_; }

 private:
  std::array<Rational, 8> c_{};
};

/// |zeta^(2a) - zeta^(2b)| for 8th roots of unity, exact.
Cyclotomic16 root_difference_modulus(long long a, long long b);

}  // namespace dspec
