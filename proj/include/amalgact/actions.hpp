#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amalgact/amalgam.hpp"
#include "amalgact/groups.hpp"

namespace amalgact {

/// Points are addressed by their position in the space's enumeration.
using PointId = std::size_t;

namespace detail {
struct SpaceImpl;
struct BlockImpl;
}  // namespace detail

/// A countable set with a fixed bijection to an initial segment of the naturals.
///
/// Regular(G): the elements of G in G's enumeration order.
/// Cosets(K): left cosets gK of a finite K, numbered by first appearance in G's enumeration.
/// Quotient(f): the image of f: G -> Q for finite Q, in Q's canonical order. This covers
///   coset spaces of infinite normal subgroups such as Z/5Z.
/// DisjointUnion: round-robin over the parts, skipping exhausted finite parts.
/// Copies(Y): countably many copies of Y. Y is cut into consecutive chunks and the pairs
///   (copy c, chunk t) are laid out along the diagonals c + t = 0, 1, 2, ... with c
///   ascending, each pair holding its chunk's points in order. Single-point chunks by
///   default; chunks closed under a group action keep every diagonal prefix closed too.
class PointSpace {
 public:
  enum class Kind { Regular, Cosets, Quotient, DisjointUnion, Copies };

  static PointSpace regular(GroupSpec G);
  static PointSpace cosets(FiniteSubgroup K);
  static PointSpace quotient(Homomorphism f);
  static PointSpace disjoint_union(std::vector<PointSpace> parts);
  /// chunk_end(start) is the end (exclusive) of the chunk beginning at `start`.
  using ChunkFn = std::function<std::size_t(std::size_t)>;
  static PointSpace copies(PointSpace base, ChunkFn chunk_end = {});

  Kind kind() const;
  /// nullopt for infinite spaces.
  std::optional<std::size_t> size() const;
  bool is_finite() const { return size().has_value(); }
  /// Parts of a DisjointUnion, or the single base of Copies.
  const std::vector<PointSpace>& parts() const;
  /// Carrier group of Regular and Cosets spaces, target group of a Quotient.
  const GroupSpec& group() const;

  /// Regular: the element at p. Cosets: the canonical representative of the coset.
  /// Quotient: the element of the target group.
  Element element(PointId p) const;
  /// Inverse of element(); for Cosets any member of the coset is accepted.
  PointId point_of(const Element& g) const;
  /// (component or copy, point inside it) for DisjointUnion and Copies.
  std::pair<std::size_t, PointId> split(PointId p) const;
  PointId join(std::size_t component, PointId inner) const;

  std::string name(PointId p) const;

  const detail::SpaceImpl* id() const noexcept { return impl_.get(); }
  friend bool operator==(const PointSpace& a, const PointSpace& b) { return a.impl_ == b.impl_; }

 private:
  explicit PointSpace(std::shared_ptr<detail::SpaceImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::SpaceImpl> impl_;
};

/// A left action of a group on a PointSpace.
class ActionSpec {
 public:
  using Fn = std::function<PointId(const Element&, PointId)>;

  static ActionSpec regular(GroupSpec G);  // g.x = gx
  static ActionSpec cosets(FiniteSubgroup K);  // g.xK = gxK
  static ActionSpec quotient(Homomorphism f);  // g.q = f(g)q
  /// All parts must be actions of the same group.
  static ActionSpec disjoint_union(std::vector<ActionSpec> parts);
  static ActionSpec copies(ActionSpec base, PointSpace::ChunkFn chunk_end = {});
  static ActionSpec custom(GroupSpec G, PointSpace space, Fn fn);

  const GroupSpec& group() const noexcept { return group_; }
  const PointSpace& space() const noexcept { return space_; }
  PointId act(const Element& g, PointId x) const;

 private:
  ActionSpec(GroupSpec G, PointSpace space, std::shared_ptr<const Fn> fn)
      : group_(std::move(G)), space_(std::move(space)), fn_(std::move(fn)) {}
  GroupSpec group_;
  PointSpace space_;
  std::shared_ptr<const Fn> fn_;
};

/// Points reachable from x by products of at most `depth` symmetric generators, sorted.
std::vector<PointId> orbit(const ActionSpec& act, PointId x, std::size_t depth);

struct TransitivityVerdict {
  bool certified = false;
  PointId start = 0;
  std::size_t prefix = 0;
  std::size_t depth = 0;       // depth limit that was allowed
  std::size_t depth_used = 0;  // BFS radius at which the prefix was covered
  std::optional<PointId> counterexample;
};

/// Checks that the first `prefix` points lie in orbit(start, depth). Only ever certifies the prefix.
TransitivityVerdict is_transitive(const ActionSpec& act, std::size_t prefix, std::size_t depth,
                                  PointId start = 0);

/// Points x among the first `prefix` with Ax and gAx disjoint. A acts through `act`.
std::vector<PointId> supp_A(const ActionSpec& act, const FiniteSubgroup& A, const Element& g,
                            std::size_t prefix);

/// Partition of the points into A-orbits for a free action of a finite A.
///
/// Blocks are numbered by their base point (least index in the orbit), so block k is the
/// k-th orbit met when scanning the points in order. Copies share the lazily built tables.
class ABlockSpace {
 public:
  ABlockSpace(ActionSpec act, FiniteSubgroup A);

  const ActionSpec& action() const;
  const FiniteSubgroup& A() const;

  /// a.p for a in A's canonical order. Throws PreconditionError if the orbit is short.
  std::vector<PointId> block_of(PointId p) const;
  PointId base(PointId p) const;
  std::size_t block_index(PointId p) const;
  PointId block_base(std::size_t k) const;
  /// The a with a.base(p) == p.
  Element offset(PointId p) const;
  /// Least N >= prefix such that the first N points are closed under A.
  std::size_t saturate(std::size_t prefix) const;

 private:
  std::shared_ptr<detail::BlockImpl> impl_;
};

struct FreenessVerdict {
  bool free = false;
  std::size_t prefix = 0;  // A-saturated prefix that was checked
  std::optional<std::pair<Element, PointId>> fixed;  // a != 1 with a.x == x
  std::optional<ABlockSpace> blocks;
};

FreenessVerdict is_free(const ActionSpec& act, const FiniteSubgroup& A, std::size_t prefix);

/// The actions used to show (G, H, A) lies in the class A'.
///
/// X = Regular(G) with G acting on the left. Y' = Regular(H) disjoint-union Copies(Y).
/// Blocks of X and Y' with equal number are identified A-equivariantly by
/// align(a.baseX_k) = phi(a).baseY_k, and H acts on X through that identification, so the
/// two A-actions on X coincide.
class AprimeWitness {
 public:
  const AmalgamSpec& spec() const noexcept { return spec_; }
  const ActionSpec& x_action() const noexcept { return x_G_; }       // G on X
  const ActionSpec& y_action() const noexcept { return y_H_; }       // H on Y'
  const ActionSpec& x_h_action() const noexcept { return x_H_; }     // H on X, transported
  const ActionSpec& y_base() const noexcept { return y_; }           // H on Y
  const ABlockSpace& x_blocks() const noexcept { return x_blocks_; }
  const ABlockSpace& y_blocks() const noexcept { return y_blocks_; }

  PointId to_y(PointId x) const;
  PointId to_x(PointId y) const;
  /// Point of Y' for point `p` of copy `c` of Y.
  PointId copy_point(std::size_t c, PointId p) const;

 private:
  friend AprimeWitness build_aprime_witness(const AmalgamSpec&, const ActionSpec&, std::size_t);
  AprimeWitness(AmalgamSpec spec, ActionSpec x_G, ActionSpec y_H, ActionSpec x_H, ActionSpec y,
                ABlockSpace xb, ABlockSpace yb)
      : spec_(std::move(spec)),
        x_G_(std::move(x_G)),
        y_H_(std::move(y_H)),
        x_H_(std::move(x_H)),
        y_(std::move(y)),
        x_blocks_(std::move(xb)),
        y_blocks_(std::move(yb)) {}

  AmalgamSpec spec_;
  ActionSpec x_G_, y_H_, x_H_, y_;
  ABlockSpace x_blocks_, y_blocks_;
};

/// Requires G infinite and A (through phi) acting freely on the first `prefix` points of Y.
AprimeWitness build_aprime_witness(const AmalgamSpec& spec, const ActionSpec& Y, std::size_t prefix = 200);

}  // namespace amalgact
