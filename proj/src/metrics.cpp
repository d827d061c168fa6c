#include "metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace dspec {

// --------------------------------------------------------------- observables

Observable Observable::constant(double c) {
  return {"constant(" + std::to_string(c) + ")", [c](const Point&) { return std::complex<double>(c, 0.0); }};
}

Observable Observable::torus_character(std::vector<std::int64_t> k) {
  std::string name = "character(";
  for (std::size_t i = 0; i < k.size(); ++i) name += (i ? "," : "") + std::to_string(k[i]);
  name += ")";
  return {name, [k](const Point& x) {
            const auto* p = std::get_if<TorusPoint>(&x);
            require(p != nullptr && p->dim == k.size(), ErrorKind::input, "character needs a torus point of matching dimension");
            // <k, x> mod 1 in fixed point, exact
            std::uint64_t phase = 0;
            for (std::size_t i = 0; i < k.size(); ++i) phase += static_cast<std::uint64_t>(k[i]) * p->x[i];
            return std::polar(1.0, 2.0 * std::numbers::pi * TorusPoint::to_double(phase));
          }};
}

Observable Observable::torus_sin(std::size_t coord) {
  return {"sin(" + std::to_string(coord) + ")", [coord](const Point& x) {
            const auto* p = std::get_if<TorusPoint>(&x);
            require(p != nullptr && coord < p->dim, ErrorKind::input, "sin observable needs a torus point");
            return std::complex<double>(std::sin(2.0 * std::numbers::pi * TorusPoint::to_double(p->x[coord])), 0.0);
          }};
}

Observable Observable::origin_indicator(const SubshiftSystem& sys, std::uint8_t symbol) {
  require(symbol < sys.alphabet(), ErrorKind::input, "indicator symbol outside alphabet");
  const GroupElement origin = sys.group().identity();
  return {"origin_indicator(" + std::to_string(symbol) + ")", [&sys, symbol, origin](const Point& x) {
            return std::complex<double>(sys.symbol(x, origin) == symbol ? 1.0 : 0.0, 0.0);
          }};
}

Observable Observable::atom_values(std::vector<double> values) {
  for (double v : values) require(std::isfinite(v), ErrorKind::input, "observable values must be finite");
  return {"atom_values", [values = std::move(values)](const Point& x) {
            const auto* p = std::get_if<FinitePoint>(&x);
            require(p != nullptr && p->id < values.size(), ErrorKind::input, "atom outside observable table");
            return std::complex<double>(values[p->id], 0.0);
          }};
}

double observable_bound(const DynamicalSystem& sys, const Observable& h, std::uint64_t seed, std::size_t count) {
  double m = 0.0;
  const auto pts = sys.has_exact_measure() ? sys.atoms() : sys.sample(seed, count);
  for (const auto& x : pts) {
    const double v = std::abs(h(x));
    require(std::isfinite(v), ErrorKind::input, "observable is not finite on a sampled point");
    m = std::max(m, v);
  }
  return 1.1 * m;
}

// ---------------------------------------------------------------- partitions

Partition::Partition(std::string name, std::vector<Predicate> cells) : name_(std::move(name)), cells_(std::move(cells)) {
  require(!cells_.empty(), ErrorKind::input, "partition needs at least one cell");
}

std::size_t Partition::cell(const Point& x) const {
  std::size_t found = cells_.size();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!cells_[i](x)) continue;
    require(found == cells_.size(), ErrorKind::partition, name_ + ": point lies in two cells");
    found = i;
  }
  require(found != cells_.size(), ErrorKind::partition, name_ + ": point lies in no cell");
  return found;
}

Partition Partition::two_set(std::string name, Predicate a) {
  return Partition(std::move(name), {a, [a](const Point& x) { return !a(x); }});
}

Partition Partition::torus_intervals(std::vector<double> cuts, std::size_t coord) {
  std::vector<std::uint64_t> edges{0};
  for (double c : cuts) {
    require(c > 0.0 && c < 1.0, ErrorKind::input, "interval cuts must lie in (0,1)");
    edges.push_back(TorusPoint::to_fixed(c));
  }
  require(std::is_sorted(edges.begin(), edges.end()) &&
              std::adjacent_find(edges.begin(), edges.end()) == edges.end(),
          ErrorKind::input, "interval cuts must be strictly increasing");
  std::vector<Predicate> cells;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const std::uint64_t lo = edges[j];
    const bool last = j + 1 == edges.size();
    const std::uint64_t hi = last ? 0 : edges[j + 1];
    cells.emplace_back([=](const Point& x) {
      const auto* p = std::get_if<TorusPoint>(&x);
      require(p != nullptr && coord < p->dim, ErrorKind::input, "interval partition needs a torus point");
      const std::uint64_t v = p->x[coord];
      return v >= lo && (last || v < hi);
    });
  }
  return Partition("torus_intervals", std::move(cells));
}

Partition Partition::cylinder(const SubshiftSystem& sys, std::vector<GroupElement> coords) {
  if (coords.empty()) coords.push_back(sys.group().identity());
  for (const auto& c : coords) sys.group().validate(c);
  std::size_t words = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    words *= sys.alphabet();
    require(words <= 4096, ErrorKind::resource, "cylinder partition has too many cells");
  }
  std::vector<Predicate> cells;
  for (std::size_t w = 0; w < words; ++w) {
    cells.emplace_back([&sys, coords, w](const Point& x) {
      std::size_t v = 0;
      for (const auto& c : coords) v = v * sys.alphabet() + sys.symbol(x, c);
      return v == w;
    });
  }
  return Partition(coords.size() == 1 ? "origin_cylinder" : "cylinder", std::move(cells));
}

Partition Partition::atom_labels(std::vector<std::size_t> labels) {
  require(!labels.empty(), ErrorKind::input, "atom labels must not be empty");
  const std::size_t l = *std::max_element(labels.begin(), labels.end()) + 1;
  auto shared = std::make_shared<const std::vector<std::size_t>>(std::move(labels));
  std::vector<Predicate> cells;
  for (std::size_t j = 0; j < l; ++j) {
    cells.emplace_back([shared, j](const Point& x) {
      const auto* p = std::get_if<FinitePoint>(&x);
      require(p != nullptr && p->id < shared->size(), ErrorKind::input, "atom outside label table");
      return (*shared)[p->id] == j;
    });
  }
  return Partition("atom_labels", std::move(cells));
}

// ---------------------------------------------------------------- semimetric

Semimetric Semimetric::observable(Observable h) {
  Semimetric s(Kind::observable);
  s.observable_ = std::make_shared<const Observable>(std::move(h));
  return s;
}

Semimetric Semimetric::hamming(Partition alpha) {
  Semimetric s(Kind::partition_hamming);
  s.partition_ = std::make_shared<const Partition>(std::move(alpha));
  return s;
}

std::string Semimetric::describe() const {
  switch (kind_) {
    case Kind::base: return "base_d";
    case Kind::base_sum: return "sum_metric";
    case Kind::observable: return "observable:" + observable_->name;
    case Kind::partition_hamming: return "partition_hamming:" + partition_->name();
  }
  return "";
}

Kernel Semimetric::kernel(const DynamicalSystem& sys) const {
  switch (kind_) {
    case Kind::base: return sys.base_kernel(false);
    case Kind::base_sum: return sys.base_kernel(true);
    case Kind::observable: {
      Kernel k;
      k.kind = Kernel::Kind::complex_abs;
      k.width = 2;
      return k;
    }
    case Kind::partition_hamming: {
      Kernel k;
      k.kind = Kernel::Kind::hamming;
      k.width = 1;
      k.cells = partition_->size();
      return k;
    }
  }
  fail(ErrorKind::input, "unknown semimetric");
}

void Semimetric::signature(const DynamicalSystem& sys, const Point& x, std::span<std::uint64_t> out) const {
  switch (kind_) {
    case Kind::base:
    case Kind::base_sum:
      sys.base_signature(x, out);
      return;
    case Kind::observable: {
      const auto v = (*observable_)(x);
      require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::input, "observable is not finite");
      out[0] = std::bit_cast<std::uint64_t>(v.real());
      out[1] = std::bit_cast<std::uint64_t>(v.imag());
      return;
    }
    case Kind::partition_hamming:
      out[0] = partition_->cell(x);
      return;
  }
}

double Semimetric::bound(const DynamicalSystem& sys) const {
  switch (kind_) {
    case Kind::base: return sys.diameter(false);
    case Kind::base_sum: return sys.diameter(true);
    case Kind::partition_hamming: return 1.0;
    case Kind::observable: return 2.0 * observable_bound(sys, *observable_, 0, 4096);
  }
  return 0.0;
}

double eval_semimetric(const DynamicalSystem& sys, const Semimetric& w, const Point& x, const Point& y) {
  sys.validate(x);
  sys.validate(y);
  const Kernel k = w.kernel(sys);
  std::vector<std::uint64_t> a(k.width), b(k.width);
  w.signature(sys, x, a);
  w.signature(sys, y, b);
  return kernel_term(k, a.data(), b.data());
}

double mean_semimetric(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t n,
                       const Point& x, const Point& y) {
  require(seq.group() == sys.group(), ErrorKind::input, "Følner sequence and system use different groups");
  sys.validate(x);
  sys.validate(y);
  const auto F = seq.set(n);
  const Kernel k = w.kernel(sys);
  std::vector<std::uint64_t> a(k.width), b(k.width);
  KernelSum sum(k);
  for (const auto& g : *F) {
    w.signature(sys, sys.act(g, x), a);
    w.signature(sys, sys.act(g, y), b);
    sum.add(a.data(), b.data());
  }
  return sum.mean(F->size());
}

std::vector<std::size_t> alpha_name(const DynamicalSystem& sys, const Partition& alpha, const FolnerSequence& seq,
                                    std::int64_t n, const Point& x) {
  require(seq.group() == sys.group(), ErrorKind::input, "Følner sequence and system use different groups");
  sys.validate(x);
  const auto F = seq.set(n);
  std::vector<std::size_t> name;
  name.reserve(F->size());
  for (const auto& g : *F) name.push_back(alpha.label(sys.act(g, x)));
  return name;
}

bool hamming_identity_check(const DynamicalSystem& sys, const Partition& alpha, const FolnerSequence& seq,
                            std::int64_t n, const Point& x, const Point& y) {
  const auto nx = alpha_name(sys, alpha, seq, n, x);
  const auto ny = alpha_name(sys, alpha, seq, n, y);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < nx.size(); ++i) differ += nx[i] != ny[i];
  const double lhs = static_cast<double>(differ) / static_cast<double>(nx.size());
  const double rhs = mean_semimetric(sys, Semimetric::hamming(alpha), seq, n, x, y);
  return lhs == rhs;
}

}  // namespace dspec
