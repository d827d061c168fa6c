#include "exact.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "error.hpp"

namespace dspec {

using boost::multiprecision::cpp_int;

namespace {

// x = m * 10^e for the shortest decimal string that round-trips to x.
void shortest_decimal(double x, cpp_int& m, int& e) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  require(res.ec == std::errc{}, ErrorKind::input, "cannot format threshold");
  const std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
  bool negative = false;
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') {
    negative = true;
    ++i;
  }
  m = 0;
  e = 0;
  bool fraction = false;
  for (; i < text.size() && text[i] != 'e'; ++i) {
    if (text[i] == '.') {
      fraction = true;
      continue;
    }
    m = m * 10 + (text[i] - '0');
    if (fraction) --e;
  }
  if (i < text.size()) e += std::stoi(std::string(text.substr(i + 1)));
  if (negative) m = -m;
}

cpp_int pow10(int k) {
  cpp_int r = 1;
  for (int i = 0; i < k; ++i) r *= 10;
  return r;
}

}  // namespace

std::strong_ordering compare_scaled(std::int64_t a, std::int64_t b, double x) {
  require(std::isfinite(x), ErrorKind::input, "non-finite threshold");
  cpp_int m;
  int e = 0;
  shortest_decimal(x, m, e);
  cpp_int lhs = a;
  cpp_int rhs = cpp_int(b) * m;
  if (e >= 0) {
    rhs *= pow10(e);
  } else {
    lhs *= pow10(-e);
  }
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t max_integer_below(std::int64_t total, double fraction) {
  if (fraction <= 0.0) return -1;
  // candidate from floating arithmetic, then corrected exactly
  double approx = std::floor(static_cast<double>(total) * fraction);
  auto u = static_cast<std::int64_t>(std::min(approx, 9.0e18));
  while (u >= 0 && compare_scaled(u, total, fraction) != std::strong_ordering::less) --u;
  while (compare_scaled(u + 1, total, fraction) == std::strong_ordering::less) ++u;
  return u;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input error";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::resource: return "resource error";
    case ErrorKind::partition: return "partition error";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::setup: return "setup error";
    case ErrorKind::config: return "config error";
  }
  return "error";
}

}  // namespace dspec
