#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amalgact/actions.hpp"
#include "amalgact/amalgam.hpp"
#include "amalgact/folner.hpp"
#include "amalgact/rational.hpp"

namespace amalgact {

/// Both factors acting on one space X, with A acting freely and identically through
/// either factor. Blocks are the A-orbits of X.
struct ActionPair {
  AmalgamSpec spec;
  ActionSpec g_act;
  ActionSpec h_act;
  ABlockSpace blocks;

  static ActionPair from(const AprimeWitness& w);
  const ActionSpec& action(Side s) const { return s == Side::G ? g_act : h_act; }
};

/// Finite A-equivariant partial bijection of X, stored one entry per block.
///
/// forward maps a block base b to sigma(b); backward maps the base of every image block to
/// its preimage. sigma(a.b) = a.sigma(b) for all a in A.
class PartialPermutation {
 public:
  explicit PartialPermutation(ABlockSpace blocks);
  /// Rebuilds from stored tables; audit() tells whether they are consistent.
  static PartialPermutation from_tables(ABlockSpace blocks, std::map<PointId, PointId> forward,
                                        std::map<PointId, PointId> backward);

  const ABlockSpace& blocks() const noexcept { return blocks_; }
  std::optional<PointId> forward(PointId x) const;
  std::optional<PointId> backward(PointId y) const;
  bool in_domain(PointId x) const { return forward_.count(blocks_.base(x)) != 0; }
  bool in_range(PointId y) const { return backward_.count(blocks_.base(y)) != 0; }

  /// sigma(a.x) := a.y for every a. Throws PreconditionError when x's block is already in
  /// the domain or y's block already in the range: assignments never remap.
  void assign(PointId x, PointId y);

  const std::map<PointId, PointId>& forward_table() const noexcept { return forward_; }
  const std::map<PointId, PointId>& backward_table() const noexcept { return backward_; }
  std::size_t size() const noexcept { return forward_.size(); }

  /// Overwrites one forward entry and nothing else; only for tamper tests.
  void overwrite_forward(PointId base, PointId image) { forward_[base] = image; }

  friend bool operator==(const PartialPermutation& a, const PartialPermutation& b) {
    return a.forward_ == b.forward_ && a.backward_ == b.backward_;
  }

 private:
  ABlockSpace blocks_;
  std::map<PointId, PointId> forward_;
  std::map<PointId, PointId> backward_;
};

/// FNV-1a over the forward table.
std::uint64_t digest(const PartialPermutation& sigma);

struct AuditResult {
  bool ok = true;
  std::string failure;
  std::optional<PointId> block;  // base of the first broken block
};

/// Checks that tables hold bases, forward and backward invert each other on every point of
/// every block, images are injective and sigma commutes with A.
AuditResult audit(const PartialPermutation& sigma);

/// Right to left: G-syllables act directly, H-syllables as sigma^-1 h sigma, head last.
/// nullopt when sigma or its inverse is needed outside the defined part.
std::optional<PointId> evaluate_word(const PartialPermutation& sigma, const ActionPair& P, const AmalgamWord& w,
                                     PointId x);
/// Every point visited before the head is applied; nullopt when undefined.
std::optional<std::vector<PointId>> evaluate_trace(const PartialPermutation& sigma, const ActionPair& P,
                                                   const AmalgamWord& w, PointId x);

struct WordWitness {
  AmalgamWord word;
  PointId x0 = 0;
  std::vector<PointId> trace;
  PointId endpoint = 0;
};

struct FreshOptions {
  std::size_t block_cutoff = 1u << 20;
};

/// Extends sigma (never remapping) so that w moves a point, using fresh blocks only.
WordWitness extend_avoid_word(PartialPermutation& sigma, const ActionPair& P, const AmalgamWord& w,
                              const FreshOptions& options = {});

/// Extends sigma so that sigma(C) = D exactly. Blocks of C must be outside the domain and
/// blocks of D outside the range; partial blocks are paired by their A-pattern.
void extend_match_folner(PartialPermutation& sigma, const FolnerSet& C, const FolnerSet& D);

struct RatioEntry {
  Side side = Side::G;
  Element generator;
  Rational ratio;      // on C; H-generators act as sigma^-1 h sigma
  Rational raw_ratio;  // H only: the matched set in Y' under h itself
};

struct MatchRecord {
  std::size_t m = 0;
  FolnerSet C;    // in X, G-Følner
  FolnerSet D;    // in X, sigma(C)
  FolnerSet D_y;  // D moved to Y', H-Følner
  std::vector<RatioEntry> ratios;
};

struct Certificate {
  std::size_t L = 0;
  std::optional<std::size_t> word_radius;
  Rational eps;
  std::vector<WordWitness> words;
  std::size_t requested_matches = 1;
  std::vector<MatchRecord> matches;
  std::uint64_t digest = 0;
};

struct GenericOptions {
  std::optional<std::size_t> word_radius;  // transversal ball for infinite factors
  std::size_t matches = 1;
  std::size_t max_m = 64;
  FreshOptions fresh;
};

struct GenericResult {
  PartialPermutation sigma;
  Certificate certificate;
};

/// Witnesses every nontrivial normal form of syllable length <= L, then matches the
/// requested number of Følner pairs at the least admissible indices.
GenericResult build_generic(const AprimeFolnerStream& stream, std::size_t L, Rational eps,
                            const GenericOptions& options = {});

/// 2 #{c in C : sigma^-1 h sigma c undefined or outside C} / |C|.
Rational conjugated_ratio(const PartialPermutation& sigma, const ActionPair& P, const FolnerSet& C,
                          const Element& h);

struct Verdict {
  bool ok = true;
  std::string failure;
};

Verdict verify_certificate(const PartialPermutation& sigma, const Certificate& cert, const AprimeWitness& witness);

}  // namespace amalgact
