#include "system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "error.hpp"
#include "folner.hpp"
#include "rng.hpp"

namespace dspec {

namespace {

std::uint64_t circle(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t d = a - b;
  return std::min(d, std::uint64_t{0} - d);
}

constexpr double kTwoPow64Inv = 0x1.0p-64;

double to_real(unsigned __int128 v) { return static_cast<double>(v); }

std::uint64_t coordinate_key(std::uint64_t seed, const GroupElement& c) {
  std::uint64_t h = hash_combine(seed, c.rank());
  for (std::size_t i = 0; i < c.rank(); ++i) h = hash_combine(h, static_cast<std::uint64_t>(c[i]));
  return h;
}

std::vector<double> cumulative(std::span<const double> p, const char* what) {
  std::vector<double> cdf;
  double s = 0.0;
  for (double v : p) {
    require(std::isfinite(v) && v >= 0.0, ErrorKind::input, std::string(what) + ": negative or non-finite probability");
    s += v;
    cdf.push_back(s);
  }
  require(std::abs(s - 1.0) <= 1e-9, ErrorKind::input, std::string(what) + ": probabilities must sum to 1");
  for (double& v : cdf) v /= s;
  cdf.back() = 1.0;
  return cdf;
}

// Stationary vector of an irreducible stochastic matrix: pi (P - I) = 0 with
// the last equation replaced by sum(pi) = 1.
std::vector<double> stationary(const std::vector<std::vector<double>>& P) {
  const auto k = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXd A(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      A(i, j) = P[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] - (i == j ? 1.0 : 0.0);
  A.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  require(lu.isInvertible(), ErrorKind::input, "markov: transition matrix is not irreducible");
  const Eigen::VectorXd x = lu.solve(rhs);
  std::vector<double> pi(x.data(), x.data() + k);
  for (const double v : pi) require(v > 0.0, ErrorKind::input, "markov: stationary vector must be positive");
  return pi;
}

}  // namespace

// ---------------------------------------------------------------- torus point

std::uint64_t TorusPoint::to_fixed(double v) {
  require(std::isfinite(v), ErrorKind::input, "torus coordinate must be finite");
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return static_cast<std::uint64_t>(std::ldexp(r, 64));
}

TorusPoint TorusPoint::from(std::span<const double> coords) {
  require(!coords.empty() && coords.size() <= kMaxTorusDim, ErrorKind::input, "torus dimension out of range");
  TorusPoint p;
  p.dim = static_cast<std::uint8_t>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) p.x[i] = to_fixed(coords[i]);
  return p;
}

std::vector<double> TorusPoint::coords() const {
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = to_double(x[i]);
  return out;
}

// ------------------------------------------------------------ subshift window

bool SubshiftWindow::covers(const GroupElement& c) const {
  for (std::size_t i = 0; i < extent.size(); ++i)
    if (c[i] < lo[i] || c[i] >= lo[i] + extent[i]) return false;
  return true;
}

std::uint8_t SubshiftWindow::at(const GroupElement& c) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < extent.size(); ++i)
    idx = idx * static_cast<std::size_t>(extent[i]) + static_cast<std::size_t>(c[i] - lo[i]);
  return symbols[idx];
}

// -------------------------------------------------------------------- kernels

double kernel_term(const Kernel& k, const std::uint64_t* a, const std::uint64_t* b) {
  switch (k.kind) {
    case Kernel::Kind::torus_max: {
      std::uint64_t m = 0;
      for (std::size_t i = 0; i < k.width; ++i) m = std::max(m, circle(a[i], b[i]));
      return static_cast<double>(m) * kTwoPow64Inv;
    }
    case Kernel::Kind::torus_sum: {
      unsigned __int128 s = 0;
      for (std::size_t i = 0; i < k.width; ++i) s += circle(a[i], b[i]);
      return to_real(s) * kTwoPow64Inv;
    }
    case Kernel::Kind::complex_abs: {
      const std::complex<double> u(std::bit_cast<double>(a[0]), std::bit_cast<double>(a[1]));
      const std::complex<double> v(std::bit_cast<double>(b[0]), std::bit_cast<double>(b[1]));
      return std::abs(u - v);
    }
    case Kernel::Kind::hamming:
      return a[0] == b[0] ? 0.0 : 1.0;
    case Kernel::Kind::weighted_mismatch: {
      double s = 0.0;
      for (std::size_t w = 0; w < k.width; ++w) {
        std::uint64_t x = a[w] ^ b[w];
        while (x != 0) {
          const int bit = std::countr_zero(x);
          const std::size_t j = w * 8 + static_cast<std::size_t>(bit / 8);
          s += k.weights[j];
          x &= ~(std::uint64_t{0xff} << (bit / 8 * 8));
        }
      }
      return s;
    }
    case Kernel::Kind::weighted_max_mismatch: {
      double m = 0.0;
      for (std::size_t w = 0; w < k.width; ++w) {
        std::uint64_t x = a[w] ^ b[w];
        while (x != 0) {
          const int bit = std::countr_zero(x);
          m = std::max(m, k.weights[w * 8 + static_cast<std::size_t>(bit / 8)]);
          x &= ~(std::uint64_t{0xff} << (bit / 8 * 8));
        }
      }
      return m;
    }
    case Kernel::Kind::matrix:
      return k.matrix[a[0] * k.matrix_size + b[0]];
  }
  return 0.0;
}

void KernelSum::add(const std::uint64_t* a, const std::uint64_t* b) {
  const Kernel& k = *kernel_;
  if (k.kind == Kernel::Kind::torus_max) {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < k.width; ++i) m = std::max(m, circle(a[i], b[i]));
    fixed_ += m;
  } else if (k.kind == Kernel::Kind::torus_sum) {
    for (std::size_t i = 0; i < k.width; ++i) fixed_ += circle(a[i], b[i]);
  } else {
    real_ += kernel_term(k, a, b);
  }
}

bool KernelSum::exceeds(double bound, std::size_t count) const {
  const double total = kernel_->fixed_point() ? to_real(fixed_) * kTwoPow64Inv : real_;
  return total > bound * static_cast<double>(count) * (1.0 + 1e-9) + 1e-300;
}

double KernelSum::mean(std::size_t count) const {
  if (kernel_->fixed_point()) {
    // q + r/count keeps the isometric case S = count * D exact.
    const unsigned __int128 q = fixed_ / count;
    const unsigned __int128 r = fixed_ % count;
    return (to_real(q) + to_real(r) / static_cast<double>(count)) * kTwoPow64Inv;
  }
  return real_ / static_cast<double>(count);
}

// ------------------------------------------------------------ base interface

double DynamicalSystem::base_distance(const Point& x, const Point& y) const {
  const Kernel k = base_kernel(false);
  std::vector<std::uint64_t> a(k.width), b(k.width);
  base_signature(x, a);
  base_signature(y, b);
  return kernel_term(k, a.data(), b.data());
}

const std::vector<std::int64_t>& DynamicalSystem::atom_weights() const {
  fail(ErrorKind::unsupported, "system has no exact measure");
}

std::vector<Point> DynamicalSystem::atoms() const {
  require(has_exact_measure(), ErrorKind::unsupported, "system has no exact measure");
  std::vector<Point> out;
  out.reserve(atom_count());
  for (std::size_t i = 0; i < atom_count(); ++i) out.emplace_back(FinitePoint{static_cast<std::uint32_t>(i)});
  return out;
}

// ------------------------------------------------------------------- torus

TorusSystem::TorusSystem(GroupSpec group, std::size_t dim, std::vector<std::vector<double>> rotations)
    : DynamicalSystem(std::move(group)), dim_(dim), rotations_(std::move(rotations)) {
  require(this->group().kind() == GroupKind::lattice, ErrorKind::unsupported,
          "torus rotations are defined for lattice groups");
  require(dim_ >= 1 && dim_ <= kMaxTorusDim, ErrorKind::input, "torus dimension must be in [1, 8]");
  require(rotations_.size() == this->group().rank(), ErrorKind::input,
          "torus needs one rotation vector per group generator");
  for (const auto& r : rotations_) {
    require(r.size() == dim_, ErrorKind::input, "rotation vector length must equal torus dimension");
    std::vector<std::uint64_t> f;
    for (double v : r) f.push_back(TorusPoint::to_fixed(v));
    fixed_rotations_.push_back(std::move(f));
  }
}

std::string TorusSystem::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "torus(m=" << dim_ << ", rotations=[";
  for (std::size_t j = 0; j < rotations_.size(); ++j) {
    os << (j ? ", " : "") << "(";
    for (std::size_t i = 0; i < dim_; ++i) os << (i ? ", " : "") << rotations_[j][i];
    os << ")";
  }
  os << "])";
  return os.str();
}

void TorusSystem::validate(const Point& x) const {
  const auto* p = std::get_if<TorusPoint>(&x);
  require(p != nullptr && p->dim == dim_, ErrorKind::input, "point is not on this torus");
}

Point TorusSystem::act(const GroupElement& g, const Point& x) const {
  group().validate(g);
  validate(x);
  TorusPoint p = std::get<TorusPoint>(x);
  for (std::size_t j = 0; j < fixed_rotations_.size(); ++j) {
    const auto gj = static_cast<std::uint64_t>(g[j]);
    for (std::size_t i = 0; i < dim_; ++i) p.x[i] += gj * fixed_rotations_[j][i];
  }
  return p;
}

Kernel TorusSystem::base_kernel(bool sum_metric) const {
  Kernel k;
  k.kind = sum_metric ? Kernel::Kind::torus_sum : Kernel::Kind::torus_max;
  k.width = dim_;
  return k;
}

void TorusSystem::base_signature(const Point& x, std::span<std::uint64_t> out) const {
  const auto& p = std::get<TorusPoint>(x);
  std::copy_n(p.x.begin(), dim_, out.begin());
}

double TorusSystem::diameter(bool sum_metric) const { return sum_metric ? 0.5 * static_cast<double>(dim_) : 0.5; }

std::vector<Point> TorusSystem::sample(std::uint64_t seed, std::size_t count) const {
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    TorusPoint p;
    p.dim = static_cast<std::uint8_t>(dim_);
    for (std::size_t c = 0; c < dim_; ++c) p.x[c] = hash_combine(hash_combine(seed, i), c);
    out.emplace_back(p);
  }
  return out;
}

std::vector<TestFunction> TorusSystem::test_functions() const {
  std::vector<TestFunction> fs;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (int k = 1; k <= 2; ++k) {
      const auto angle = [i, k](const Point& x) {
        return 2.0 * std::numbers::pi * k * TorusPoint::to_double(std::get<TorusPoint>(x).x[i]);
      };
      fs.emplace_back([angle](const Point& x) { return std::cos(angle(x)); });
      fs.emplace_back([angle](const Point& x) { return std::sin(angle(x)); });
    }
  }
  return fs;
}

Point TorusSystem::point(std::span<const double> coords) const {
  require(coords.size() == dim_, ErrorKind::input, "torus point has wrong dimension");
  return TorusPoint::from(coords);
}

// ----------------------------------------------------------------- subshift

SubshiftSystem::SubshiftSystem(std::size_t dimension, std::size_t alphabet, Measure measure,
                               std::int64_t metric_radius, std::int64_t window_radius)
    : DynamicalSystem(GroupSpec::lattice(dimension)),
      alphabet_(alphabet),
      measure_(std::move(measure)),
      metric_radius_(metric_radius),
      window_radius_(window_radius) {
  require(alphabet_ >= 2 && alphabet_ <= 255, ErrorKind::input, "subshift alphabet size must be in [2, 255]");
  require(metric_radius_ >= 0 && metric_radius_ <= 64, ErrorKind::input, "metric radius must be in [0, 64]");
  require(window_radius_ >= 0, ErrorKind::input, "window radius must be nonnegative");
  if (const auto* b = std::get_if<Bernoulli>(&measure_)) {
    require(b->probabilities.size() == alphabet_, ErrorKind::input, "bernoulli: one probability per symbol");
    stationary_cdf_ = cumulative(b->probabilities, "bernoulli");
  } else {
    const auto& P = std::get<Markov>(measure_).transition;
    require(dimension == 1, ErrorKind::unsupported, "markov measures are supported on Z only");
    require(P.size() == alphabet_, ErrorKind::input, "markov: transition matrix must be alphabet x alphabet");
    for (const auto& row : P) {
      require(row.size() == alphabet_, ErrorKind::input, "markov: transition matrix must be square");
      forward_cdf_.push_back(cumulative(row, "markov row"));
    }
    const auto pi = stationary(P);
    stationary_cdf_ = cumulative(pi, "markov stationary");
    for (std::size_t a = 0; a < alphabet_; ++a) {
      std::vector<double> row(alphabet_);
      for (std::size_t b = 0; b < alphabet_; ++b) row[b] = pi[b] * P[b][a] / pi[a];
      double s = 0.0;
      for (double v : row) s += v;
      for (double& v : row) v /= s;
      backward_cdf_.push_back(cumulative(row, "markov reversal"));
    }
  }
  const auto gens = group().standard_generators();
  support_ = word_ball(group(), gens, metric_radius_, 10'000'000);
  std::sort(support_.begin(), support_.end());
  require(support_.size() <= 8 * 4096, ErrorKind::resource, "subshift metric support too large");
  for (const auto& h : support_) {
    std::int64_t len = 0;
    for (std::size_t i = 0; i < h.rank(); ++i) len += std::abs(h[i]);
    support_weights_.push_back(std::ldexp(1.0, static_cast<int>(-len)));
  }
}

std::string SubshiftSystem::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "subshift(d=" << dimension() << ", alphabet=" << alphabet_ << ", ";
  if (const auto* b = std::get_if<Bernoulli>(&measure_)) {
    os << "bernoulli(";
    for (std::size_t i = 0; i < b->probabilities.size(); ++i) os << (i ? ", " : "") << b->probabilities[i];
    os << ")";
  } else {
    os << "markov";
  }
  os << ", W=" << metric_radius_ << ")";
  return os.str();
}

double SubshiftSystem::truncation_error() const {
  // number of h in Z^d with |h|_1 = k is sum_i 2^i C(d,i) C(k-1,i-1)
  const auto d = static_cast<int>(dimension());
  double tail = 0.0;
  for (int k = static_cast<int>(metric_radius_) + 1; k <= static_cast<int>(metric_radius_) + 400; ++k) {
    double count = 0.0;
    for (int i = 1; i <= std::min(d, k); ++i) {
      double c = std::ldexp(1.0, i);
      for (int t = 0; t < i; ++t) c *= static_cast<double>(d - t) / (t + 1);
      for (int t = 0; t < i - 1; ++t) c *= static_cast<double>(k - 1 - t) / (t + 1);
      count += c;
    }
    tail += count * std::ldexp(1.0, -k);
  }
  return tail;
}

void SubshiftSystem::validate(const Point& x) const {
  const auto* p = std::get_if<SubshiftPoint>(&x);
  require(p != nullptr, ErrorKind::input, "point is not a subshift configuration");
  require(p->offset.rank() == dimension(), ErrorKind::input, "subshift point offset has wrong rank");
  if (p->window) {
    const auto& w = *p->window;
    require(w.lo.rank() == dimension() && w.extent.size() == dimension(), ErrorKind::input,
            "subshift window has wrong rank");
    std::size_t cells = 1;
    for (auto e : w.extent) {
      require(e >= 0, ErrorKind::input, "subshift window extent must be nonnegative");
      cells *= static_cast<std::size_t>(e);
    }
    require(w.symbols.size() == cells, ErrorKind::input, "subshift window symbol count mismatch");
    for (auto s : w.symbols) require(s < alphabet_, ErrorKind::input, "subshift symbol outside alphabet");
  }
}

Point SubshiftSystem::act(const GroupElement& g, const Point& x) const {
  group().validate(g);
  SubshiftPoint p = std::get<SubshiftPoint>(x);
  p.offset = group().multiply(g, p.offset);
  return p;
}

std::uint8_t SubshiftSystem::draw(std::span<const double> cdf, double u) const {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint8_t>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), alphabet_ - 1));
}

std::uint8_t SubshiftSystem::generated_symbol(std::uint64_t seed, const GroupElement& c,
                                              const SubshiftWindow* window) const {
  if (std::holds_alternative<Bernoulli>(measure_)) return draw(stationary_cdf_, to_unit(coordinate_key(seed, c)));
  // Markov chain on Z: continue from the nearest window edge, or from an
  // origin symbol drawn from the stationary law.
  const auto u = [&](std::int64_t t) { return to_unit(coordinate_key(hash_combine(seed, 0x6d61726b), GroupElement{t})); };
  std::int64_t lo = 0, hi = 0;
  std::uint8_t at_lo = 0, at_hi = 0;
  if (window != nullptr && window->extent[0] > 0) {
    lo = window->lo[0];
    hi = lo + window->extent[0] - 1;
    at_lo = window->symbols.front();
    at_hi = window->symbols.back();
  } else {
    at_lo = at_hi = draw(stationary_cdf_, u(0));
  }
  const std::int64_t t = c[0];
  if (t > hi) {
    std::uint8_t s = at_hi;
    for (std::int64_t i = hi + 1; i <= t; ++i) s = draw(forward_cdf_[s], u(i));
    return s;
  }
  std::uint8_t s = at_lo;
  for (std::int64_t i = lo - 1; i >= t; --i) s = draw(backward_cdf_[s], u(i));
  return s;
}

std::uint8_t SubshiftSystem::symbol(const Point& x, const GroupElement& h) const {
  const auto& p = std::get<SubshiftPoint>(x);
  const GroupElement c = group().multiply(h, p.offset);
  if (p.window && p.window->covers(c)) return p.window->at(c);
  return generated_symbol(p.seed, c, p.window.get());
}

Kernel SubshiftSystem::base_kernel(bool sum_metric) const {
  Kernel k;
  k.kind = sum_metric ? Kernel::Kind::weighted_max_mismatch : Kernel::Kind::weighted_mismatch;
  k.width = (support_.size() + 7) / 8;
  k.weights = support_weights_;
  k.weights.resize(k.width * 8, 0.0);
  return k;
}

void SubshiftSystem::base_signature(const Point& x, std::span<std::uint64_t> out) const {
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t j = 0; j < support_.size(); ++j)
    out[j / 8] |= static_cast<std::uint64_t>(symbol(x, support_[j])) << (8 * (j % 8));
}

double SubshiftSystem::diameter(bool sum_metric) const {
  if (sum_metric) return 1.0;  // weight of the origin
  double s = 0.0;
  for (double w : support_weights_) s += w;
  return s;
}

std::vector<Point> SubshiftSystem::sample(std::uint64_t seed, std::size_t count) const {
  std::vector<Point> out;
  out.reserve(count);
  const bool markov = std::holds_alternative<Markov>(measure_);
  for (std::size_t i = 0; i < count; ++i) {
    SubshiftPoint p;
    p.seed = hash_combine(seed, i);
    p.offset = group().identity();
    if (markov && window_radius_ > 0) {
      // materialize [-R, R] once so lookups near the orbit segment are O(1)
      auto w = std::make_shared<SubshiftWindow>();
      w->lo = GroupElement{-window_radius_};
      w->extent = {2 * window_radius_ + 1};
      w->symbols.resize(static_cast<std::size_t>(2 * window_radius_ + 1));
      const std::size_t mid = static_cast<std::size_t>(window_radius_);
      w->symbols[mid] = generated_symbol(p.seed, GroupElement{0}, nullptr);
      const auto u = [&](std::int64_t t) {
        return to_unit(coordinate_key(hash_combine(p.seed, 0x6d61726b), GroupElement{t}));
      };
      for (std::int64_t t = 1; t <= window_radius_; ++t) {
        const auto j = mid + static_cast<std::size_t>(t);
        w->symbols[j] = draw(forward_cdf_[w->symbols[j - 1]], u(t));
      }
      for (std::int64_t t = -1; t >= -window_radius_; --t) {
        const auto j = mid - static_cast<std::size_t>(-t);
        w->symbols[j] = draw(backward_cdf_[w->symbols[j + 1]], u(t));
      }
      p.window = std::move(w);
    }
    out.emplace_back(std::move(p));
  }
  return out;
}

std::vector<TestFunction> SubshiftSystem::test_functions() const {
  std::vector<TestFunction> fs;
  const GroupElement origin = group().identity();
  GroupElement e1 = origin;
  e1[0] = 1;
  for (std::size_t a = 0; a < alphabet_; ++a)
    fs.emplace_back([this, a, origin](const Point& x) { return symbol(x, origin) == a ? 1.0 : 0.0; });
  fs.emplace_back([this, origin, e1](const Point& x) { return symbol(x, origin) == symbol(x, e1) ? 1.0 : 0.0; });
  return fs;
}

Point SubshiftSystem::point(std::uint64_t seed, GroupElement lo, std::vector<std::int64_t> extent,
                            std::vector<std::uint8_t> symbols) const {
  auto w = std::make_shared<SubshiftWindow>();
  w->lo = std::move(lo);
  w->extent = std::move(extent);
  w->symbols = std::move(symbols);
  SubshiftPoint p{seed, group().identity(), std::move(w)};
  validate(p);
  return p;
}

Point SubshiftSystem::point(std::uint64_t seed) const { return SubshiftPoint{seed, group().identity(), nullptr}; }

// ------------------------------------------------------------------- finite

FiniteSystem::FiniteSystem(GroupSpec group, std::vector<std::vector<std::uint32_t>> permutations,
                           std::vector<std::int64_t> weights, std::vector<std::vector<double>> distance)
    : DynamicalSystem(std::move(group)),
      n_(weights.size()),
      permutations_(std::move(permutations)),
      weights_(std::move(weights)),
      distance_(std::move(distance)) {
  const auto& G = this->group();
  require(G.kind() != GroupKind::heisenberg3, ErrorKind::unsupported,
          "finite systems support lattice and finite abelian groups");
  require(n_ >= 1, ErrorKind::input, "finite system needs at least one atom");
  require(n_ <= (std::size_t{1} << 24), ErrorKind::resource, "finite system too large");
  require(permutations_.size() == G.rank(), ErrorKind::input, "need one permutation per group generator");
  for (const auto& p : permutations_) {
    require(p.size() == n_, ErrorKind::input, "permutation length must equal atom count");
    std::vector<bool> seen(n_, false);
    for (auto v : p) {
      require(v < n_ && !seen[v], ErrorKind::input, "generator is not a permutation");
      seen[v] = true;
    }
  }
  for (std::size_t i = 0; i < permutations_.size(); ++i)
    for (std::size_t j = i + 1; j < permutations_.size(); ++j)
      for (std::size_t x = 0; x < n_; ++x)
        require(permutations_[i][permutations_[j][x]] == permutations_[j][permutations_[i][x]], ErrorKind::input,
                "generator permutations must commute");
  for (const auto& p : permutations_) {
    Cycles c;
    c.cycle_of.assign(n_, UINT32_MAX);
    c.position.assign(n_, 0);
    for (std::uint32_t s = 0; s < n_; ++s) {
      if (c.cycle_of[s] != UINT32_MAX) continue;
      std::vector<std::uint32_t> cyc;
      for (std::uint32_t x = s; c.cycle_of[x] == UINT32_MAX; x = p[x]) {
        c.cycle_of[x] = static_cast<std::uint32_t>(c.cycles.size());
        c.position[x] = static_cast<std::uint32_t>(cyc.size());
        cyc.push_back(x);
      }
      c.cycles.push_back(std::move(cyc));
    }
    cycles_.push_back(std::move(c));
  }
  if (G.kind() == GroupKind::finite_abelian)
    for (std::size_t i = 0; i < cycles_.size(); ++i)
      for (const auto& cyc : cycles_[i].cycles)
        require(G.moduli()[i] % static_cast<std::int64_t>(cyc.size()) == 0, ErrorKind::input,
                "generator order must divide its modulus");
  for (auto w : weights_) {
    require(w >= 0, ErrorKind::input, "atom weights must be nonnegative");
    require(total_ <= INT64_MAX / 4 - w, ErrorKind::input, "atom weights overflow");
    total_ += w;
  }
  require(total_ > 0, ErrorKind::input, "atom weights must not all be zero");
  for (const auto& p : permutations_)
    for (std::size_t x = 0; x < n_; ++x)
      require(weights_[p[x]] == weights_[x], ErrorKind::setup, "measure is not invariant under the action");
  require(distance_.size() == n_, ErrorKind::input, "distance matrix must be N x N");
  for (std::size_t a = 0; a < n_; ++a) {
    require(distance_[a].size() == n_, ErrorKind::input, "distance matrix must be N x N");
    for (std::size_t b = 0; b < n_; ++b) {
      const double d = distance_[a][b];
      require(std::isfinite(d) && d >= 0.0, ErrorKind::input, "distances must be finite and nonnegative");
      require(a == b ? d == 0.0 : d > 0.0, ErrorKind::input, "distance must vanish exactly on the diagonal");
    }
  }
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b)
      require(distance_[a][b] == distance_[b][a], ErrorKind::input, "distance matrix must be symmetric");
  if (n_ <= 512)
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        for (std::size_t c = 0; c < n_; ++c)
          require(distance_[a][c] <= distance_[a][b] + distance_[b][c] + 1e-12, ErrorKind::input,
                  "distance matrix violates the triangle inequality");
}

std::vector<std::vector<double>> FiniteSystem::discrete_metric(std::size_t n) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  return d;
}

std::vector<std::vector<double>> FiniteSystem::cyclic_metric(std::size_t n) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i > j ? i - j : j - i;
      d[i][j] = static_cast<double>(std::min(k, n - k)) / static_cast<double>(n);
    }
  return d;
}

std::string FiniteSystem::describe() const {
  return "finite(N=" + std::to_string(n_) + ", group=" + group().describe() + ")";
}

void FiniteSystem::validate(const Point& x) const {
  const auto* p = std::get_if<FinitePoint>(&x);
  require(p != nullptr && p->id < n_, ErrorKind::input, "point is not an atom of this system");
}

std::uint32_t FiniteSystem::power(std::size_t generator, std::int64_t k, std::uint32_t x) const {
  const auto& c = cycles_[generator];
  const auto& cyc = c.cycles[c.cycle_of[x]];
  const auto len = static_cast<std::int64_t>(cyc.size());
  std::int64_t pos = (static_cast<std::int64_t>(c.position[x]) + k % len) % len;
  if (pos < 0) pos += len;
  return cyc[static_cast<std::size_t>(pos)];
}

std::uint32_t FiniteSystem::act(const GroupElement& g, std::uint32_t atom) const {
  for (std::size_t i = 0; i < permutations_.size(); ++i)
    if (g[i] != 0) atom = power(i, g[i], atom);
  return atom;
}

Point FiniteSystem::act(const GroupElement& g, const Point& x) const {
  group().validate(g);
  validate(x);
  return FinitePoint{act(g, std::get<FinitePoint>(x).id)};
}

Kernel FiniteSystem::base_kernel(bool sum_metric) const {
  require(!sum_metric, ErrorKind::unsupported, "finite systems have no companion metric");
  Kernel k;
  k.kind = Kernel::Kind::matrix;
  k.width = 1;
  k.matrix_size = n_;
  k.matrix.reserve(n_ * n_);
  for (const auto& row : distance_) k.matrix.insert(k.matrix.end(), row.begin(), row.end());
  return k;
}

void FiniteSystem::base_signature(const Point& x, std::span<std::uint64_t> out) const {
  out[0] = std::get<FinitePoint>(x).id;
}

double FiniteSystem::diameter(bool sum_metric) const {
  require(!sum_metric, ErrorKind::unsupported, "finite systems have no companion metric");
  double m = 0.0;
  for (const auto& row : distance_)
    for (double v : row) m = std::max(m, v);
  return m;
}

std::vector<Point> FiniteSystem::sample(std::uint64_t seed, std::size_t count) const {
  std::vector<std::int64_t> cdf(n_);
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n_; ++i) cdf[i] = s += weights_[i];
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::int64_t>(
        (static_cast<unsigned __int128>(hash_combine(seed, i)) * static_cast<std::uint64_t>(total_)) >> 64);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    out.emplace_back(FinitePoint{static_cast<std::uint32_t>(it - cdf.begin())});
  }
  return out;
}

std::vector<TestFunction> FiniteSystem::test_functions() const {
  std::vector<TestFunction> fs;
  for (std::uint32_t a = 0; a < n_; ++a)
    fs.emplace_back([a](const Point& x) { return std::get<FinitePoint>(x).id == a ? 1.0 : 0.0; });
  return fs;
}

// --------------------------------------------------------------- diagnostic

double invariance_residual(const DynamicalSystem& sys, const GroupElement& g, std::uint64_t seed,
                           std::size_t count) {
  sys.group().validate(g);
  if (sys.has_exact_measure()) {
    // E 1_a(gX) = mu(g^-1 a); compare with mu(a) in integers.
    const auto& fin = dynamic_cast<const FiniteSystem&>(sys);
    const auto& w = fin.atom_weights();
    std::vector<std::int64_t> pushed(w.size(), 0);
    for (std::uint32_t x = 0; x < w.size(); ++x) pushed[fin.act(g, x)] += w[x];
    std::int64_t worst = 0;
    for (std::size_t a = 0; a < w.size(); ++a) worst = std::max(worst, std::abs(pushed[a] - w[a]));
    return static_cast<double>(worst) / static_cast<double>(fin.weight_total());
  }
  require(count >= 1, ErrorKind::input, "invariance residual needs at least one sample");
  const auto xs = sys.sample(seed, count);
  const auto fs = sys.test_functions();
  std::vector<double> diff(fs.size(), 0.0);
  for (const auto& x : xs) {
    const Point gx = sys.act(g, x);
    for (std::size_t f = 0; f < fs.size(); ++f) diff[f] += fs[f](gx) - fs[f](x);
  }
  double worst = 0.0;
  for (double d : diff) worst = std::max(worst, std::abs(d) / static_cast<double>(count));
  return worst;
}

}  // namespace dspec
