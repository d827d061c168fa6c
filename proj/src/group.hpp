#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dspec {

inline constexpr std::size_t kMaxRank = 8;

/// Integer coordinate vector of a group element. The meaning of the
/// coordinates is fixed by the owning GroupSpec.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(std::initializer_list<std::int64_t> coords);
  explicit GroupElement(std::span<const std::int64_t> coords);

  std::size_t rank() const { return rank_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }
  std::span<const std::int64_t> coords() const { return {coords_.data(), rank_}; }

  std::string str() const;

  // lexicographic on coordinates; this order is the public enumeration order
  // of Følner sets
  friend std::strong_ordering operator<=>(const GroupElement&, const GroupElement&) = default;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  std::array<std::int64_t, kMaxRank> coords_{};
  std::uint8_t rank_ = 0;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept;
};

enum class GroupKind { lattice, heisenberg3, finite_abelian };

/// One of the supported amenable groups: Z^d, the discrete Heisenberg group
/// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab'), or a finite abelian product
/// Z/m_1 x ... x Z/m_k.
class GroupSpec {
 public:
  static GroupSpec lattice(std::size_t dimension);
  static GroupSpec heisenberg3();
  static GroupSpec finite_abelian(std::vector<std::int64_t> moduli);

  GroupKind kind() const { return kind_; }
  std::size_t rank() const { return rank_; }
  const std::vector<std::int64_t>& moduli() const { return moduli_; }
  bool is_finite() const { return kind_ == GroupKind::finite_abelian; }
  /// Number of elements; finite groups only.
  std::uint64_t order() const;
  std::string describe() const;

  GroupElement identity() const;
  /// Builds an element, reducing finite_abelian residues into [0, m).
  GroupElement element(std::span<const std::int64_t> coords) const;
  GroupElement element(std::initializer_list<std::int64_t> coords) const {
    return element(std::span<const std::int64_t>(coords.begin(), coords.size()));
  }
  bool contains(const GroupElement& g) const;
  /// Throws input error when g does not belong to this group.
  void validate(const GroupElement& g) const;

  GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
  GroupElement inverse(const GroupElement& g) const;

  /// Symmetric generating set: +-e_i on lattices, +-x and +-y on the
  /// Heisenberg group, e_i and its inverse on finite products.
  std::vector<GroupElement> standard_generators() const;
  /// All elements in lexicographic order; finite groups only.
  std::vector<GroupElement> elements() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

 private:
  GroupSpec(GroupKind kind, std::size_t rank, std::vector<std::int64_t> moduli)
      : kind_(kind), rank_(rank), moduli_(std::move(moduli)) {}

  GroupKind kind_;
  std::size_t rank_;
  std::vector<std::int64_t> moduli_;
};

inline GroupElement multiply(const GroupElement& g, const GroupElement& h, const GroupSpec& spec) {
  return spec.multiply(g, h);
}

}  // namespace dspec
