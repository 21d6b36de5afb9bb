#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amalgact/groups.hpp"

namespace amalgact {

/// Which factor of G *_A H a letter lives in.
enum class Side : std::uint8_t { G, H };

inline Side other(Side s) { return s == Side::G ? Side::H : Side::G; }
inline char side_letter(Side s) { return s == Side::G ? 'G' : 'H'; }

struct Syllable {
  Side side;
  Element element;

  friend bool operator==(const Syllable&, const Syllable&) = default;
};

namespace detail {
struct AmalgamData;
}

/// G *_A H over a finite A, with A given once in each factor and an isomorphism
/// phi: A_in_G -> A_in_H identifying the two copies.
class AmalgamSpec {
 public:
  /// `phi_images[i]` is the image of A_in_G.elements()[i]. Checked bijective and homomorphic.
  AmalgamSpec(GroupSpec G, GroupSpec H, FiniteSubgroup A_in_G, FiniteSubgroup A_in_H,
              std::vector<Element> phi_images);
  static AmalgamSpec free_product(GroupSpec G, GroupSpec H);

  const GroupSpec& group(Side s) const;
  const GroupSpec& G() const { return group(Side::G); }
  const GroupSpec& H() const { return group(Side::H); }
  const FiniteSubgroup& A(Side s) const;
  /// |A|
  std::size_t amalgamated_order() const { return A(Side::G).size(); }

  Element phi(const Element& a) const;
  Element phi_inverse(const Element& b) const;
  /// Moves an element of A (stored in its G copy) into the copy living in `s`.
  Element to_side(const Element& a_in_G, Side s) const;
  Element to_G(const Element& a, Side from) const;

  const detail::AmalgamData* id() const noexcept { return data_.get(); }
  friend bool operator==(const AmalgamSpec& a, const AmalgamSpec& b) { return a.data_ == b.data_; }

 private:
  std::shared_ptr<const detail::AmalgamData> data_;
};

/// Normal form a * s_1 * s_2 * ... * s_n, syllables listed left to right.
///
/// The head lives in the G copy of A; each syllable is the canonical minimum of
/// its right coset A*s in its factor, lies outside A, and factors alternate.
class AmalgamWord {
 public:
  AmalgamWord(AmalgamSpec spec, Element head, std::vector<Syllable> syllables);
  static AmalgamWord identity(const AmalgamSpec& spec);

  const AmalgamSpec& spec() const noexcept { return spec_; }
  const Element& head() const noexcept { return head_; }
  const std::vector<Syllable>& syllables() const noexcept { return syllables_; }
  std::size_t length() const noexcept { return syllables_.size(); }
  bool is_identity() const;

  friend bool operator==(const AmalgamWord& a, const AmalgamWord& b) {
    return a.spec_ == b.spec_ && a.head_ == b.head_ && a.syllables_ == b.syllables_;
  }

 private:
  AmalgamSpec spec_;
  Element head_;
  std::vector<Syllable> syllables_;
};

/// Canonical word order: syllable length, then syllables (factor G before H, then the
/// factor's canonical order), then head.
bool word_less(const AmalgamWord& a, const AmalgamWord& b);

/// Normal form of the product of `raw`, read left to right.
AmalgamWord reduce(const AmalgamSpec& spec, std::span<const Syllable> raw);
/// Head as a G-letter followed by the syllables; reduce(flatten(w)) == w.
std::vector<Syllable> flatten(const AmalgamWord& w);

AmalgamWord amalgam_multiply(const AmalgamWord& u, const AmalgamWord& v);
AmalgamWord amalgam_inverse(const AmalgamWord& w);

/// Right-coset representatives of A in the factor, excluding A itself, canonically
/// sorted. Infinite factors need `ball_radius`: only cosets meeting the Cayley ball of
/// that radius are listed.
std::vector<Element> transversal(const AmalgamSpec& spec, Side side,
                                 std::optional<std::size_t> ball_radius = std::nullopt);

struct WordEnumerationOptions {
  std::optional<std::size_t> ball_radius;
};

/// Every normal form with at most `max_length` syllables, each once, in word_less order.
std::vector<AmalgamWord> enumerate_words(const AmalgamSpec& spec, std::size_t max_length,
                                         const WordEnumerationOptions& options = {});

/// Text form "a | G:rep H:rep ..." with canonical element names.
std::string to_text(const AmalgamWord& w);
AmalgamWord parse_word(const AmalgamSpec& spec, std::string_view text);

/// G *_A H where A_in_H = pi(A_in_G) and phi = pi restricted to A.
class DoubleSpec {
 public:
  DoubleSpec(AmalgamSpec base, Homomorphism pi);
  /// Builds the amalgam from G, an epimorphism pi: G -> H and a finite A <= G.
  static DoubleSpec from_epimorphism(Homomorphism pi, FiniteSubgroup A);

  const AmalgamSpec& base() const noexcept { return base_; }
  const Homomorphism& pi() const noexcept { return pi_; }

 private:
  AmalgamSpec base_;
  Homomorphism pi_;
};

/// psi: G *_A H -> H, pi on G-letters and the identity on H-letters.
Element psi(const DoubleSpec& d, const AmalgamWord& w);

}  // namespace amalgact
