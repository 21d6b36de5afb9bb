#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amalgact/actions.hpp"
#include "amalgact/groups.hpp"
#include "amalgact/rational.hpp"

namespace amalgact {

/// Sorted, duplicate-free point ids of one space.
using FolnerSet = std::vector<PointId>;

FolnerSet make_folner_set(std::vector<PointId> points);

/// |C xor gC| / |C| for the action on points.
Rational ratio(const ActionSpec& act, const FolnerSet& C, const Element& g);
/// Same for the left regular action on a set of group elements.
Rational ratio(std::span<const Element> C, const Element& g);

struct FolnerReport {
  Rational epsilon;
  std::vector<Element> test_set;
  std::vector<Rational> ratios;
  bool verdict = false;  // every ratio strictly below epsilon
};

FolnerReport is_folner(const ActionSpec& act, const FolnerSet& C, std::span<const Element> F, Rational eps);
FolnerReport is_folner(std::span<const Element> C, std::span<const Element> F, Rational eps);

/// Term n (n >= 1) of a Følner sequence, or nullopt once the stream has nothing more.
using FolnerStream = std::function<std::optional<FolnerSet>(std::size_t n)>;

struct MatchOptions {
  std::size_t max_stream = 4096;          // last stream index scanned
  std::size_t translate_cutoff = 1000000;  // candidates tried per translate search
};

/// Outcome of matching a small Følner set against a term of a Følner stream.
struct MatchResult {
  Rational lambda;
  std::size_t n = 0;  // chosen stream index
  std::size_t d = 0;
  std::size_t r = 0;
  FolnerSet d_n;
  FolnerSet d_prime;
  std::vector<PointId> deleted;  // the r canonically largest points of d_n
  FolnerReport c_report;
  FolnerReport d_report;
  Rational size_ratio;      // |D_n| / |D'|
  Rational deletion_ratio;  // |D' xor D_n| / |D_n|
  bool bounds_hold = false;  // size_ratio < 2 and deletion_ratio < eps/8
};

struct GroupMatch : MatchResult {
  FolnerReport c0_report;           // the hypothesis on C0, checked but not required
  std::vector<Element> translates;  // g_1, ..., g_d
  std::vector<Element> c_prime;     // union of C0 g_i, canonically sorted
};

/// Equal-cardinality matching for a group G (left regular action) against an H-action.
///
/// C0 need not be (eps, F)-Følner; c0_report says whether it is, c_report judges C'.
/// Scans for the first D_n that is (eps/4, E)-Følner with |D_n| > lambda |C0|, where
/// lambda = max{8/eps, 2}; writes |D_n| = d |C0| + r; takes d pairwise disjoint right
/// translates of C0 greedily over G's enumeration; deletes the r largest points of D_n.
GroupMatch match_cardinalities(const GroupSpec& G, std::span<const Element> C0, const ActionSpec& H_act,
                               const FolnerStream& D_seq, Rational eps, std::span<const Element> F,
                               std::span<const Element> E, const MatchOptions& options = {});

struct ActionMatch : MatchResult {
  ActionSpec copies;  // Copies(X) carrying C'
  std::size_t first_copy = 0;
  FolnerSet c_prime;  // C0 placed in copies first_copy .. first_copy + d - 1
};

/// Matching for actions: C' is d copies of C0 inside Copies(X).
ActionMatch match_for_actions(const ActionSpec& X, const FolnerSet& C0, const ActionSpec& Y,
                              const FolnerStream& D_seq, Rational eps, std::span<const Element> F,
                              std::span<const Element> E, const MatchOptions& options = {},
                              std::size_t first_copy = 0);

/// Right-translates successive sets so that their A-saturations are pairwise disjoint.
/// Each translate is the enumeration-least h that works.
class Disjointifier {
 public:
  Disjointifier(GroupSpec G, FiniteSubgroup A, std::size_t cutoff = 1000000);

  /// Returns C h (canonically sorted) and records A C h as used.
  std::vector<Element> next(std::span<const Element> C, Element* translate = nullptr);

 private:
  GroupSpec G_;
  FiniteSubgroup A_;
  std::size_t cutoff_;
  ElementSet used_;
};

std::vector<std::vector<Element>> disjointify(const GroupSpec& G, const FiniteSubgroup& A,
                                              const std::vector<std::vector<Element>>& C_seq,
                                              std::size_t cutoff = 1000000);

/// Elements of word length <= k in S (t = s * gen), canonically sorted.
std::vector<Element> cayley_ball(const GroupSpec& G, std::span<const Element> S, std::size_t k);
/// Spheres 0..k of the same BFS; each sphere canonically sorted.
std::vector<std::vector<Element>> cayley_spheres(const GroupSpec& G, std::span<const Element> S, std::size_t k);

/// Directed Cayley edges (s, s * gen) with s in C and s * gen outside C.
std::size_t edge_boundary(std::span<const Element> S, std::span<const Element> C);

struct PrescribedTerm {
  std::size_t n = 0;  // 1-based
  std::size_t a = 0;
  std::size_t k = 0;  // |B(k)| <= a < |B(k+1)|
  std::size_t ball_size = 0;
  std::size_t ball_boundary = 0;
  std::vector<Element> F;
  std::vector<Element> K;  // F = B(k) + K
  std::size_t boundary = 0;
  Rational ratio;  // |dF| / |F|
  Rational bound;  // (1 + |S|) |dB(k)| / |B(k)|
  bool holds = false;
};

/// F_n = B(k_n) together with the a_n - |B(k_n)| canonically least points of the next sphere.
std::vector<PrescribedTerm> prescribed_size_folner(const GroupSpec& G, std::span<const Element> S,
                                                   std::span<const std::size_t> a_seq);

/// One row per term: n,size,boundary,ratio.
std::string prescribed_csv(std::span<const PrescribedTerm> terms);

/// m-th pair of matched Følner sets for an A' witness, m >= 1, at eps_m = 1/(m+1).
///
/// The X side is an A-saturated Cayley ball of G, translated away from earlier pairs,
/// with whole A-blocks deleted; the Y' side is d copies of an A-saturated Følner set of Y
/// placed in copies of Y not used before.
struct AprimePair {
  std::size_t m = 0;
  Rational eps;
  FolnerSet x_set;
  FolnerSet y_set;
  std::size_t radius = 0;       // Cayley ball radius on the X side
  std::size_t y_radius = 0;     // orbit radius of the Y set (0 and whole Y when Y is finite)
  Element translate;
  std::size_t d = 0;
  std::size_t r = 0;
  std::size_t first_copy = 0;
  Rational size_ratio;
  Rational deletion_ratio;
};

struct AprimeStreamOptions {
  std::size_t max_radius = 4096;
  std::size_t translate_cutoff = 1000000;
};

namespace detail {
struct PairCache;
}

class AprimeFolnerStream {
 public:
  explicit AprimeFolnerStream(AprimeWitness witness, AprimeStreamOptions options = {});

  const AprimeWitness& witness() const noexcept;
  /// Pairs are built in order and cached; the returned reference stays valid.
  const AprimePair& pair(std::size_t m) const;

 private:
  std::shared_ptr<detail::PairCache> cache_;
};

struct SuppCheck {
  Side side = Side::G;
  Element g;
  std::size_t count = 0;
  bool pass = false;
};

struct PairCheck {
  std::size_t m = 0;
  Rational eps;
  std::size_t size = 0;
  bool sizes_equal = false;
  Rational x_ratio;  // worst G-generator ratio on X
  Rational y_ratio;  // worst H-generator ratio on Y'
  bool disjoint = false;  // from every earlier pair, on both sides
  bool pass = false;
};

struct AprimeOptions {
  std::size_t prefix = 200;
  std::size_t supp_samples = 8;
  std::size_t supp_threshold = 0;  // 0 means prefix / 4
  std::size_t pairs = 3;
};

struct AprimeReport {
  std::size_t x_prefix = 0;
  std::size_t y_prefix = 0;
  TransitivityVerdict transitivity;                         // (i)
  std::size_t supp_threshold = 0;
  std::vector<SuppCheck> supports;                          // (ii)
  std::vector<PairCheck> pairs;                             // (iii)
  FreenessVerdict x_free, y_free;                           // (iv)

  bool condition_i() const { return transitivity.certified; }
  bool condition_ii() const;
  bool condition_iii() const;
  bool condition_iv() const { return x_free.free && y_free.free; }
  bool passed() const { return condition_i() && condition_ii() && condition_iii() && condition_iv(); }
};

AprimeReport check_aprime(const AprimeFolnerStream& stream, const AprimeOptions& options = {});

}  // namespace amalgact
