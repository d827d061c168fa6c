#include "cyclotomic.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/math/constants/constants.hpp>
#include <sstream>

#include "error.hpp"

namespace dspec {

namespace {

using Float = boost::multiprecision::cpp_bin_float_100;

long long mod16(long long m) { return ((m % 16) + 16) % 16; }

}  // namespace

Cyclotomic16 Cyclotomic16::zeta(long long m) {
  Cyclotomic16 z;
  const long long r = mod16(m);
  if (r < 8)
    z.c_[r] = 1;
  else
    z.c_[r - 8] = -1;
  return z;
}

Cyclotomic16 Cyclotomic16::gaussian(const Rational& re, const Rational& im) {
  Cyclotomic16 z;
  z.c_[0] = re;
  z.c_[4] = im;  // i = zeta^4
  return z;
}

Cyclotomic16 Cyclotomic16::conj() const {
  // conj(zeta^m) = zeta^(16-m) = -zeta^(8-m)
  Cyclotomic16 z;
  z.c_[0] = c_[0];
  for (std::size_t m = 1; m < 8; ++m) z.c_[8 - m] = -c_[m];
  return z;
}

bool Cyclotomic16::is_zero() const {
  for (const auto& a : c_)
    if (a != 0) return false;
  return true;
}

Cyclotomic16 operator+(Cyclotomic16 a, const Cyclotomic16& b) {
  for (std::size_t m = 0; m < 8; ++m) a.c_[m] += b.c_[m];
  return a;
}

Cyclotomic16 operator-(Cyclotomic16 a, const Cyclotomic16& b) {
  for (std::size_t m = 0; m < 8; ++m) a.c_[m] -= b.c_[m];
  return a;
}

Cyclotomic16 operator-(Cyclotomic16 a) {
  for (auto& x : a.c_) x = -x;
  return a;
}

Cyclotomic16 operator*(const Cyclotomic16& a, const Cyclotomic16& b) {
  Cyclotomic16 z;
  for (std::size_t i = 0; i < 8; ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < 8; ++j) {
      if (b.c_[j] == 0) continue;
      const std::size_t k = i + j;
      if (k < 8)
        z.c_[k] += a.c_[i] * b.c_[j];
      else
        z.c_[k - 8] -= a.c_[i] * b.c_[j];
    }
  }
  return z;
}

int Cyclotomic16::real_sign() const {
  require(is_real(), ErrorKind::input, "sign requested for a non-real cyclotomic element");
  if (is_zero()) return 0;
  // value = sum a_m cos(pi m / 8); each term carries relative error ~1e-99
  const Float pi = boost::math::constants::pi<Float>();
  Float value = 0, scale = 0;
  for (std::size_t m = 0; m < 8; ++m) {
    const Float a(c_[m]);
    value += a * cos(pi * static_cast<int>(m) / 8);
    scale += abs(a);
  }
  const Float err = scale * Float("1e-90");
  require(abs(value) > err, ErrorKind::numerical, "cyclotomic sign not resolved at 100 digits");
  return value > 0 ? 1 : -1;
}

std::complex<double> Cyclotomic16::approx() const {
  std::complex<double> z = 0.0;
  const double pi = boost::math::constants::pi<double>();
  for (std::size_t m = 0; m < 8; ++m)
    z += static_cast<double>(c_[m]) * std::polar(1.0, pi * static_cast<double>(m) / 8.0);
  return z;
}

std::string Cyclotomic16::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t m = 0; m < 8; ++m) {
    if (c_[m] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << c_[m] << ")";
    if (m > 0) os << "z^" << m;
  }
  if (first) os << "0";
  return os.str();
}

Cyclotomic16 root_difference_modulus(long long a, long long b) {
  // |w^a - w^b| = |1 - w^k| = 2 sin(pi k / 8) for w = zeta^2, k = b - a mod 8,
  // and 2 sin(pi k / 8) = -i (zeta^k - zeta^-k) with i = zeta^4
  const long long k = (((b - a) % 8) + 8) % 8;
  if (k == 0) return {};
  return Cyclotomic16::zeta(4) * (Cyclotomic16::zeta(-k) - Cyclotomic16::zeta(k));
}

}  // namespace dspec
