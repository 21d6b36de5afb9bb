#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "amalgact/lattice.hpp"

namespace amalgact {

enum class GroupKind { FiniteTable, FreeAbelian, DirectProduct };

namespace detail {
struct GroupImpl;
}

struct IntVectorHash {
  std::size_t operator()(const IntVector& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// An element of a concrete group.
///
/// Coordinates are a table index (FiniteTable), an integer vector (FreeAbelian) or
/// the concatenated coordinates of the components (DirectProduct). The canonical
/// total order is lexicographic on coordinates, which agrees with table order,
/// lexicographic vector order and componentwise-lexicographic order respectively.
///
/// An Element refers to its group by address and must not outlive the GroupSpec
/// that created it.
class Element {
 public:
  Element() = default;
  Element(const detail::GroupImpl* owner, IntVector coords)
      : owner_(owner), coords_(std::move(coords)) {}

  const detail::GroupImpl* owner() const noexcept { return owner_; }
  const IntVector& coords() const noexcept { return coords_; }

  friend bool operator==(const Element& a, const Element& b) {
    return a.owner_ == b.owner_ && a.coords_ == b.coords_;
  }
  friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
    if (auto c = a.coords_ <=> b.coords_; c != 0) return c;
    return std::compare_three_way{}(a.owner_, b.owner_);
  }

 private:
  const detail::GroupImpl* owner_ = nullptr;
  IntVector coords_;
};

struct ElementHash {
  std::size_t operator()(const Element& g) const noexcept { return IntVectorHash{}(g.coords()); }
};

using ElementSet = std::unordered_set<Element, ElementHash>;

/// A generator index with an integer exponent; factorizations are read left to right.
using GeneratorPower = std::pair<std::size_t, std::int64_t>;

class GroupSpec {
 public:
  /// Validates the table (identity, Latin square, associativity) and that the
  /// generators generate. Names must be non-empty and free of " |:,()".
  static GroupSpec finite_table(std::vector<std::string> names,
                                std::vector<std::vector<std::size_t>> table,
                                std::vector<std::size_t> generators);
  /// Z/n as a table, elements named "0".."n-1", generator 1.
  static GroupSpec cyclic(std::size_t n);
  /// Closure of permutations of {0..degree-1}; elements named in one-line notation and
  /// ordered lexicographically, so the identity comes first. Composition (p*q)(i) = p(q(i)).
  static GroupSpec from_permutations(std::size_t degree,
                                     std::vector<std::vector<std::size_t>> generators);
  /// Z^rank with generators e1, -e1, e2, -e2, ...
  static GroupSpec free_abelian(std::size_t rank);
  static GroupSpec free_abelian(std::size_t rank, std::vector<IntVector> generators);
  /// Generators are the embedded component generators, component by component.
  static GroupSpec direct_product(std::vector<GroupSpec> components);

  GroupKind kind() const;
  std::optional<std::size_t> order() const;
  bool is_finite() const { return order().has_value(); }
  std::size_t rank() const;  // FreeAbelian only
  const std::vector<GroupSpec>& components() const;

  Element identity() const;
  const std::vector<Element>& generators() const;
  /// Generators followed by any inverses missing from the list.
  const std::vector<Element>& symmetric_generators() const;

  /// Deterministic exhaustive enumeration: table order; BFS shells in the generators with
  /// canonical order inside a shell; diagonal order over component enumerations.
  Element element_at(std::size_t index) const;
  std::size_t index_of(const Element& g) const;

  bool owns(const Element& g) const noexcept;
  Element table_element(std::size_t index) const;
  Element vector_element(IntVector v) const;
  Element tuple(const std::vector<Element>& parts) const;
  Element component(const Element& g, std::size_t i) const;

  std::string name(const Element& g) const;
  Element parse(std::string_view name) const;

  /// One expression of g as a product of generator powers.
  std::vector<GeneratorPower> factorize(const Element& g) const;

  const detail::GroupImpl* id() const noexcept { return impl_.get(); }
  friend bool operator==(const GroupSpec& a, const GroupSpec& b) { return a.impl_ == b.impl_; }

 private:
  explicit GroupSpec(std::shared_ptr<detail::GroupImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::GroupImpl> impl_;

  friend struct detail::GroupImpl;
};

Element multiply(const Element& g, const Element& h);
Element inverse(const Element& g);
Element power(const Element& g, std::int64_t k);
Element identity_of(const Element& g);

/// The first `count` elements of the enumeration (fewer for small finite groups).
std::vector<Element> enumerate(const GroupSpec& G, std::size_t count);

/// Subgroup generated by `gens`, canonically sorted. Throws SearchExhausted past `cutoff`.
std::vector<Element> closure(const GroupSpec& G, std::span<const Element> gens,
                             std::size_t cutoff = 1u << 20);

/// Whether `gens` generate G. Exact for finite groups and free abelian groups.
bool generates(const GroupSpec& G, std::span<const Element> gens);

class FiniteSubgroup {
 public:
  FiniteSubgroup(GroupSpec ambient, std::vector<Element> elements);
  static FiniteSubgroup trivial(const GroupSpec& ambient);
  static FiniteSubgroup generated_by(const GroupSpec& ambient, std::span<const Element> gens);

  const GroupSpec& ambient() const noexcept { return ambient_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool contains(const Element& g) const { return members_.count(g) != 0; }
  /// Position of `a` in the canonical listing; throws if a is not a member.
  std::size_t position(const Element& a) const;

 private:
  GroupSpec ambient_;
  std::vector<Element> elements_;
  std::unordered_map<Element, std::size_t, ElementHash> members_;
};

enum class CosetSide {
  Left,   // g A
  Right,  // A g
};

/// Canonical-minimum element of the coset of g.
Element coset_rep(const Element& g, const FiniteSubgroup& A, CosetSide side);

class Homomorphism {
 public:
  /// `images[i]` is the image of source.generators()[i]. Relations are checked:
  /// exhaustively for tables, via commutation and lattice relations for free abelian
  /// sources, componentwise plus cross commutation for direct products.
  Homomorphism(GroupSpec source, GroupSpec target, std::vector<Element> images);
  static Homomorphism identity(const GroupSpec& G);

  const GroupSpec& source() const noexcept { return source_; }
  const GroupSpec& target() const noexcept { return target_; }
  const std::vector<Element>& images() const noexcept { return images_; }

  Element operator()(const Element& g) const;

 private:
  GroupSpec source_;
  GroupSpec target_;
  std::vector<Element> images_;
};

Element apply_hom(const Homomorphism& f, const Element& g);

}  // namespace amalgact
