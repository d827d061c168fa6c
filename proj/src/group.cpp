#include "group.hpp"

#include <algorithm>

#include "error.hpp"
#include "rng.hpp"

namespace dspec {

GroupElement::GroupElement(std::initializer_list<std::int64_t> coords)
    : GroupElement(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

GroupElement::GroupElement(std::span<const std::int64_t> coords) {
  require(coords.size() <= kMaxRank, ErrorKind::input,
          "group elements support at most " + std::to_string(kMaxRank) + " coordinates");
  std::copy(coords.begin(), coords.end(), coords_.begin());
  rank_ = static_cast<std::uint8_t>(coords.size());
}

std::string GroupElement::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) out += ",";
    out += std::to_string(coords_[i]);
  }
  return out + ")";
}

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
  std::uint64_t h = g.rank();
  for (auto c : g.coords()) h = hash_combine(h, static_cast<std::uint64_t>(c));
  return static_cast<std::size_t>(h);
}

GroupSpec GroupSpec::lattice(std::size_t dimension) {
  require(dimension >= 1 && dimension <= kMaxRank, ErrorKind::input,
          "lattice dimension must be in [1, " + std::to_string(kMaxRank) + "]");
  return GroupSpec(GroupKind::lattice, dimension, {});
}

GroupSpec GroupSpec::heisenberg3() { return GroupSpec(GroupKind::heisenberg3, 3, {}); }

GroupSpec GroupSpec::finite_abelian(std::vector<std::int64_t> moduli) {
  require(!moduli.empty() && moduli.size() <= kMaxRank, ErrorKind::input,
          "finite abelian group needs 1.." + std::to_string(kMaxRank) + " moduli");
  for (auto m : moduli) require(m >= 1, ErrorKind::input, "moduli must be >= 1");
  auto rank = moduli.size();
  return GroupSpec(GroupKind::finite_abelian, rank, std::move(moduli));
}

std::uint64_t GroupSpec::order() const {
  require(is_finite(), ErrorKind::unsupported, "order() of an infinite group");
  std::uint64_t n = 1;
  for (auto m : moduli_) n *= static_cast<std::uint64_t>(m);
  return n;
}

std::string GroupSpec::describe() const {
  switch (kind_) {
    case GroupKind::lattice: return "Z^" + std::to_string(rank_);
    case GroupKind::heisenberg3: return "H3(Z)";
    case GroupKind::finite_abelian: {
      std::string s;
      for (std::size_t i = 0; i < moduli_.size(); ++i) {
        if (i) s += " x ";
        s += "Z/" + std::to_string(moduli_[i]);
      }
      return s;
    }
  }
  return "?";
}

GroupElement GroupSpec::identity() const {
  std::array<std::int64_t, kMaxRank> zeros{};
  return GroupElement(std::span<const std::int64_t>(zeros.data(), rank_));
}

GroupElement GroupSpec::element(std::span<const std::int64_t> coords) const {
  require(coords.size() == rank_, ErrorKind::input,
          "element has " + std::to_string(coords.size()) + " coordinates, " + describe() +
              " needs " + std::to_string(rank_));
  GroupElement g(coords);
  if (kind_ == GroupKind::finite_abelian) {
    for (std::size_t i = 0; i < rank_; ++i) {
      auto m = moduli_[i];
      g[i] = ((g[i] % m) + m) % m;
    }
  }
  return g;
}

bool GroupSpec::contains(const GroupElement& g) const {
  if (g.rank() != rank_) return false;
  if (kind_ == GroupKind::finite_abelian) {
    for (std::size_t i = 0; i < rank_; ++i)
      if (g[i] < 0 || g[i] >= moduli_[i]) return false;
  }
  return true;
}

void GroupSpec::validate(const GroupElement& g) const {
  if (!contains(g)) fail(ErrorKind::input, "element " + g.str() + " does not belong to " + describe());
}

GroupElement GroupSpec::multiply(const GroupElement& g, const GroupElement& h) const {
  validate(g);
  validate(h);
  GroupElement out = g;
  switch (kind_) {
    case GroupKind::lattice:
      for (std::size_t i = 0; i < rank_; ++i) out[i] = g[i] + h[i];
      break;
    case GroupKind::heisenberg3:
      out[0] = g[0] + h[0];
      out[1] = g[1] + h[1];
      out[2] = g[2] + h[2] + g[0] * h[1];
      break;
    case GroupKind::finite_abelian:
      for (std::size_t i = 0; i < rank_; ++i) out[i] = (g[i] + h[i]) % moduli_[i];
      break;
  }
  return out;
}

GroupElement GroupSpec::inverse(const GroupElement& g) const {
  validate(g);
  GroupElement out = g;
  switch (kind_) {
    case GroupKind::lattice:
      for (std::size_t i = 0; i < rank_; ++i) out[i] = -g[i];
      break;
    case GroupKind::heisenberg3:
      out[0] = -g[0];
      out[1] = -g[1];
      out[2] = -g[2] + g[0] * g[1];
      break;
    case GroupKind::finite_abelian:
      for (std::size_t i = 0; i < rank_; ++i) out[i] = (moduli_[i] - g[i]) % moduli_[i];
      break;
  }
  return out;
}

std::vector<GroupElement> GroupSpec::standard_generators() const {
  std::vector<GroupElement> gens;
  auto unit = [&](std::size_t i, std::int64_t v) {
    GroupElement e = identity();
    e[i] = v;
    return element(e.coords());
  };
  std::size_t free_coords = kind_ == GroupKind::heisenberg3 ? 2 : rank_;
  for (std::size_t i = 0; i < free_coords; ++i) {
    for (std::int64_t s : {1, -1}) {
      auto e = unit(i, s);
      if (e != identity() && std::find(gens.begin(), gens.end(), e) == gens.end()) gens.push_back(e);
    }
  }
  return gens;
}

std::vector<GroupElement> GroupSpec::elements() const {
  require(is_finite(), ErrorKind::unsupported, "cannot enumerate the infinite group " + describe());
  std::vector<GroupElement> out;
  out.reserve(order());
  GroupElement g = identity();
  while (true) {
    out.push_back(g);
    std::size_t i = rank_;
    while (i > 0) {
      --i;
      if (++g[i] < moduli_[i]) break;
      g[i] = 0;
      if (i == 0) return out;
    }
  }
}

}  // namespace dspec
