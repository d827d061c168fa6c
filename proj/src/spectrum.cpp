#include "spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "error.hpp"
#include "folner.hpp"
#include "parallel.hpp"

namespace dspec {

L2Estimate l2_distance(const DynamicalSystem& sys, const Observable& h1, const Observable& h2, std::uint64_t seed,
                       std::size_t sample_count) {
  require(sample_count >= 2, ErrorKind::input, "l2_distance needs at least 2 samples");
  const auto pts = sys.sample(seed, sample_count);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& x : pts) {
    const double v = std::norm(h1(x) - h2(x));
    sum += v;
    sum2 += v * v;
  }
  const double S = static_cast<double>(pts.size());
  const double mean = sum / S;
  const double var = std::max(0.0, sum2 / S - mean * mean) * S / (S - 1.0);
  L2Estimate r;
  r.value = std::sqrt(mean);
  r.sample_count = pts.size();
  // delta method: se(sqrt m) = se(m) / (2 sqrt m)
  r.std_error = r.value > 0.0 ? std::sqrt(var / S) / (2.0 * r.value) : 0.0;
  return r;
}

Observable compose(const DynamicalSystem& sys, const Observable& h, const GroupElement& g) {
  return {h.name + " o " + g.str(), [&sys, h, g](const Point& x) { return h(sys.act(g, x)); }};
}

double OrbitSamples::distance(std::size_t i, std::size_t j) const {
  const auto* a = values.row(static_cast<Eigen::Index>(i)).data();
  const auto* b = values.row(static_cast<Eigen::Index>(j)).data();
  const std::size_t S = sample_count();
  double s = 0.0;
  for (std::size_t k = 0; k < S; ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s / static_cast<double>(S));
}

OrbitSamples orbit_samples(const DynamicalSystem& sys, const Observable& h, std::int64_t radius, std::uint64_t seed,
                           std::size_t sample_count, int workers, std::size_t ball_budget) {
  require(radius >= 0, ErrorKind::input, "ball radius must be nonnegative");
  require(sample_count >= 2, ErrorKind::input, "orbit sampling needs at least 2 samples");
  OrbitSamples o;
  o.seed = seed;
  o.elements = word_ball(sys.group(), {}, radius, ball_budget);
  const auto pts = sys.sample(seed, sample_count);
  o.values.resize(static_cast<Eigen::Index>(o.elements.size()), static_cast<Eigen::Index>(pts.size()));
  parallel_for(o.elements.size(), workers, [&](std::size_t i) {
    auto* row = o.values.row(static_cast<Eigen::Index>(i)).data();
    for (std::size_t s = 0; s < pts.size(); ++s) row[s] = h(sys.act(o.elements[i], pts[s]));
  });
  return o;
}

std::vector<std::size_t> orbit_net(const OrbitSamples& orbit, double epsilon) {
  require(epsilon > 0.0, ErrorKind::input, "net radius must be positive");
  std::vector<std::size_t> net;
  for (std::size_t i = 0; i < orbit.elements.size(); ++i) {
    bool covered = false;
    for (auto j : net)
      if (orbit.distance(i, j) < epsilon) {
        covered = true;
        break;
      }
    if (!covered) net.push_back(i);
  }
  return net;
}

std::size_t orbit_net_size(const DynamicalSystem& sys, const Observable& h, std::int64_t radius, double epsilon,
                           std::uint64_t seed, std::size_t sample_count, int workers) {
  return orbit_net(orbit_samples(sys, h, radius, seed, sample_count, workers), epsilon).size();
}

L2OrbitGram orbit_gram(const OrbitSamples& orbit) {
  L2OrbitGram g;
  g.elements = orbit.elements;
  g.sample_count = orbit.sample_count();
  g.seed = orbit.seed;
  const double S = static_cast<double>(g.sample_count);
  // one shared sample block: G = V V* / S is PSD up to rounding
  g.gram = (orbit.values * orbit.values.adjoint()) / S;
  g.diag_min = INFINITY;
  g.diag_max = 0.0;
  for (Eigen::Index i = 0; i < orbit.values.rows(); ++i) {
    double sum = 0.0, sum2 = 0.0;
    for (Eigen::Index s = 0; s < orbit.values.cols(); ++s) {
      const double v = std::norm(orbit.values(i, s));
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / S;
    const double var = std::max(0.0, sum2 / S - mean * mean) * S / (S - 1.0);
    g.diag_min = std::min(g.diag_min, mean);
    g.diag_max = std::max(g.diag_max, mean);
    g.diag_std_error = std::max(g.diag_std_error, std::sqrt(var / S));
  }
  return g;
}

std::size_t gram_effective_rank(const L2OrbitGram& gram, double tol, double psd_tol) {
  require(gram.gram.rows() == gram.gram.cols(), ErrorKind::input, "Gram matrix must be square");
  if (gram.gram.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram.gram, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::numerical, "Gram eigen-decomposition failed");
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  require(ev.minCoeff() >= -psd_tol * top, ErrorKind::numerical,
          "Gram matrix indefinite beyond tolerance (min eigenvalue " + std::to_string(ev.minCoeff()) + ")");
  return static_cast<std::size_t>((ev.array() > tol * top).count());
}

const char* to_string(ApVerdict v) {
  switch (v) {
    case ApVerdict::precompact_consistent: return "precompact-consistent";
    case ApVerdict::growing: return "growing";
    case ApVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

ApReport ap_test(const DynamicalSystem& sys, const Observable& h, const ApOptions& opt) {
  require(opt.radii.size() >= 2, ErrorKind::input, "ap_test needs at least two radii");
  require(std::is_sorted(opt.radii.begin(), opt.radii.end()) && opt.radii.front() >= 0, ErrorKind::input,
          "ap_test radii must be nonnegative and ascending");
  require(!opt.epsilon_factors.empty(), ErrorKind::input, "ap_test needs an epsilon grid");
  ApReport rep;
  rep.observable = h.name;
  rep.radii = opt.radii;
  rep.seed = opt.seed;
  rep.sample_count = opt.sample_count;
  const auto orbit = orbit_samples(sys, h, opt.radii.back(), opt.seed, opt.sample_count, opt.workers);
  // ||h||_2 from the identity row; a zero observable is measured on scale 1
  const auto id = std::find(orbit.elements.begin(), orbit.elements.end(), sys.group().identity());
  const auto row = static_cast<Eigen::Index>(id - orbit.elements.begin());
  rep.norm = std::sqrt(orbit.values.row(row).cwiseAbs2().mean());
  const double scale = rep.norm > 0.0 ? rep.norm : 1.0;
  for (auto r : opt.radii) rep.ball_sizes.push_back(word_ball(sys.group(), {}, r, kDefaultBallBudget).size());

  bool all_stable = true, any_growing = false;
  for (double f : opt.epsilon_factors) {
    const double eps = f * scale;
    rep.epsilons.push_back(eps);
    const auto net = orbit_net(orbit, eps);
    std::vector<std::size_t> sizes;
    for (auto b : rep.ball_sizes)
      sizes.push_back(static_cast<std::size_t>(std::lower_bound(net.begin(), net.end(), b) - net.begin()));
    const double prev = static_cast<double>(sizes[sizes.size() - 2]);
    const double last = static_cast<double>(sizes.back());
    all_stable = all_stable && last - prev <= std::max(1.0, opt.stable_fraction * prev);
    any_growing = any_growing || last >= opt.growth_factor * prev;
    rep.net_sizes.push_back(std::move(sizes));
  }
  if (any_growing) {
    rep.verdict = ApVerdict::growing;
    rep.reason = "net size multiplied by at least the growth factor over the last radius step";
  } else if (all_stable) {
    rep.verdict = ApVerdict::precompact_consistent;
    rep.reason = "net sizes stable over the last radius step at every epsilon";
  } else {
    rep.verdict = ApVerdict::inconclusive;
    rep.reason = "net sizes neither stable nor growing geometrically";
  }
  return rep;
}

ApCrosscheck ap_vs_complexity_crosscheck(const DynamicalSystem& sys, const Observable& h, const FolnerSequence& seq,
                                         const std::vector<std::int64_t>& n_grid, const std::vector<double>& eps_grid,
                                         std::size_t sample_count, const ApOptions& ap, const ComplexityOptions& copt,
                                         const BoundednessThresholds& t) {
  ApCrosscheck r;
  r.ap = ap_test(sys, h, ap);
  r.profile = complexity_profile(sys, Semimetric::observable(h), seq, n_grid, eps_grid, ap.seed, sample_count, copt);
  r.boundedness = boundedness_diagnostic(r.profile, t);
  const auto a = r.ap.verdict;
  const auto b = r.boundedness.verdict;
  r.agree = (a == ApVerdict::precompact_consistent && b == Verdict::bounded) ||
            (a == ApVerdict::growing && b == Verdict::growing);
  r.conclusive_conflict = (a == ApVerdict::precompact_consistent && b == Verdict::growing) ||
                          (a == ApVerdict::growing && b == Verdict::bounded);
  return r;
}

LemmaMeanResult lemma_mean_bound_check(const FiniteSystem& sys, const std::vector<Rational>& h, const Rational& C,
                                       const Rational& k) {
  const std::size_t N = sys.atom_count();
  require(h.size() == N, ErrorKind::input, "observable table size differs from atom count");
  const auto& w = sys.atom_weights();
  const Rational T(sys.weight_total());
  LemmaMeanResult r;
  Rational mean = 0;
  r.integral_abs = 0;
  bool bounded = C > 0;
  for (std::size_t x = 0; x < N; ++x) {
    mean += Rational(w[x]) * h[x] / T;
    r.integral_abs += Rational(w[x]) * abs(h[x]) / T;
    bounded = bounded && abs(h[x]) <= C;
  }
  r.double_integral = 0;
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = 0; y < N; ++y) r.double_integral += Rational(w[x] * w[y]) * abs(h[x] - h[y]);
  r.double_integral /= T * T;
  if (k > 1) r.bound = (2 + C) / k + C / (k - 1);
  if (!bounded)
    r.reason = "|h| <= C fails";
  else if (mean != 0)
    r.reason = "integral of h is not zero";
  else if (!(k > 1))
    r.reason = "k must exceed 1";
  else if (!(r.double_integral * k * k < 1))
    r.reason = "double integral of H is not below 1/k^2";
  r.hypothesis = r.reason.empty();
  if (!r.hypothesis) return r;  // vacuous pass
  r.slack = r.bound - r.integral_abs;
  r.holds = r.slack >= 0;
  r.reason = r.holds ? "conclusion holds" : "conclusion violated";
  return r;
}

namespace {

void require_exponent8(const FiniteSystem& sys) {
  require(sys.group().is_finite(), ErrorKind::unsupported, "character decomposition needs a finite abelian group");
  for (auto m : sys.group().moduli())
    require(8 % m == 0, ErrorKind::unsupported, "character decomposition supports exponents dividing 8");
}

// Exponent e with value zeta^(2e), or -1 for zero; anything else is rejected.
long long root_exponent(const Cyclotomic16& z) {
  if (z.is_zero()) return -1;
  for (long long e = 0; e < 8; ++e)
    if (z == Cyclotomic16::zeta(2 * e)) return e;
  fail(ErrorKind::input, "basis values must be 0 or 8th roots of unity");
}

Cyclotomic16 inner(const FiniteSystem& sys, const std::vector<Cyclotomic16>& a, const std::vector<Cyclotomic16>& b) {
  Cyclotomic16 s;
  for (std::size_t x = 0; x < a.size(); ++x)
    if (!a[x].is_zero() && !b[x].is_zero()) s = s + Cyclotomic16(sys.atom_weights()[x]) * a[x] * b[x].conj();
  return s * Cyclotomic16(Rational(1, sys.weight_total()));
}

// Coordinates of v in an orthogonal equal-norm basis; v must lie in the span.
bool in_span(const FiniteSystem& sys, const std::vector<std::vector<Cyclotomic16>>& basis, const Cyclotomic16& inv_norm,
             const std::vector<Cyclotomic16>& v) {
  std::vector<Cyclotomic16> rest = v;
  for (const auto& e : basis) {
    const auto a = inner(sys, v, e) * inv_norm;
    for (std::size_t x = 0; x < rest.size(); ++x) rest[x] = rest[x] - a * e[x];
  }
  return std::all_of(rest.begin(), rest.end(), [](const Cyclotomic16& z) { return z.is_zero(); });
}

}  // namespace

std::vector<std::vector<Cyclotomic16>> character_basis(const FiniteSystem& sys) {
  require_exponent8(sys);
  const auto& G = sys.group();
  const auto elems = G.elements();
  const auto& mod = G.moduli();
  const std::size_t N = sys.atom_count();
  // chi_a(g) = zeta^(sum_i a_i g_i 16 / m_i)
  const auto chi = [&](const GroupElement& a, const GroupElement& g) {
    long long e = 0;
    for (std::size_t i = 0; i < mod.size(); ++i) e += a[i] * g[i] * (16 / mod[i]);
    return e;
  };
  std::vector<std::vector<Cyclotomic16>> basis;
  std::vector<char> seen(N, 0);
  for (std::uint32_t base = 0; base < N; ++base) {
    if (seen[base]) continue;
    std::map<std::uint32_t, GroupElement> reach;  // atom -> some g with g base = atom
    std::vector<GroupElement> stabilizer;
    for (const auto& g : elems) {
      const auto y = sys.act(g, base);
      reach.emplace(y, g);
      if (y == base) stabilizer.push_back(g);
    }
    for (const auto& [y, g] : reach) seen[y] = 1;
    for (const auto& a : elems) {
      if (!std::all_of(stabilizer.begin(), stabilizer.end(), [&](const auto& s) { return chi(a, s) % 16 == 0; }))
        continue;
      std::vector<Cyclotomic16> u(N);
      for (const auto& [y, g] : reach) u[y] = Cyclotomic16::zeta(chi(a, g));
      basis.push_back(std::move(u));
    }
  }
  return basis;
}

BasisBoundResult basis_bound_check(const FiniteSystem& sys, const std::vector<std::vector<Cyclotomic16>>& basis,
                                   const std::vector<Cyclotomic16>& f) {
  require_exponent8(sys);
  const std::size_t N = sys.atom_count();
  require(f.size() == N, ErrorKind::input, "function table size differs from atom count");
  require(!basis.empty(), ErrorKind::input, "basis must be nonempty");
  std::vector<std::vector<long long>> expo(basis.size(), std::vector<long long>(N));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require(basis[i].size() == N, ErrorKind::input, "basis vector size differs from atom count");
    for (std::size_t x = 0; x < N; ++x) expo[i][x] = root_exponent(basis[i][x]);
  }
  // orthogonal with a common squared norm m
  const auto m = inner(sys, basis[0], basis[0]);
  require(!m.is_zero(), ErrorKind::setup, "basis vector with zero norm");
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const auto ip = inner(sys, basis[i], basis[j]);
      require(i == j ? ip == m : ip.is_zero(), ErrorKind::setup, "basis is not orthogonal with equal norms");
    }
  const Cyclotomic16 inv_m(Rational(1) / m.coeff(0));  // m is rational: |u|^2 is 0 or 1
  for (const auto& g : sys.group().standard_generators())
    for (const auto& e : basis) {
      std::vector<Cyclotomic16> eg(N);
      for (std::uint32_t x = 0; x < N; ++x) eg[x] = e[sys.act(g, x)];
      require(in_span(sys, basis, inv_m, eg), ErrorKind::setup, "basis span is not invariant (nonzero residual)");
    }
  require(in_span(sys, basis, inv_m, f), ErrorKind::input, "f is not in the span of the basis");

  // squared form: |f(gx) - f(gy)|^2 <= (||f||^2 / m) (sum_i |u_i(x) - u_i(y)|)^2
  const auto fnorm = inner(sys, f, f) * inv_m;
  BasisBoundResult r;
  std::vector<std::vector<Cyclotomic16>> rhs(N, std::vector<Cyclotomic16>(N));
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = 0; y < N; ++y) {
      Cyclotomic16 s;
      for (const auto& e : expo) {
        if (e[x] < 0 && e[y] < 0) continue;
        s = s + (e[x] < 0 || e[y] < 0 ? Cyclotomic16(1) : root_difference_modulus(e[x], e[y]));
      }
      rhs[x][y] = fnorm * s * s;
    }
  for (const auto& g : sys.group().elements())
    for (std::uint32_t x = 0; x < N; ++x)
      for (std::uint32_t y = 0; y < N; ++y) {
        const auto lhs = (f[sys.act(g, x)] - f[sys.act(g, y)]).norm2();
        const int sign = (rhs[x][y] - lhs).real_sign();
        ++r.triples;
        if (sign == 0) ++r.equalities;
        if (sign < 0 && r.holds) {
          r.holds = false;
          r.witness = "g=" + g.str() + " x=" + std::to_string(x) + " y=" + std::to_string(y);
        }
      }
  return r;
}

}  // namespace dspec
