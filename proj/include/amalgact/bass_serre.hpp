#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amalgact/amalgam.hpp"
#include "amalgact/groups.hpp"

namespace amalgact {

struct HypothesisOptions {
  std::size_t scan_cutoff = 4096;  // elements of A, and of H for infinite H
};

struct HypothesisReport {
  bool surjective = false;
  bool injective_on_A = false;
  bool index_ok = false;
  std::size_t a_scanned = 0;  // elements of A checked for injectivity
  bool a_finite = false;      // A was enumerated completely
  std::optional<std::pair<Element, Element>> collision;  // a != a' in A with pi(a) == pi(a')
  std::optional<std::size_t> index;                       // [H : pi(A)] when known exactly
  std::vector<Element> coset_reps;                        // left coset representatives found
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// The hypotheses on a double: pi: G -> H onto, pi injective on A, [H : pi(A)] >= 2.
/// A is given by generators and may be infinite (a lattice subgroup); injectivity is then
/// certified only on the scanned elements, and the index condition once two cosets are seen.
HypothesisReport check_hypotheses(const Homomorphism& pi, std::span<const Element> A_generators,
                                  const HypothesisOptions& options = {});
HypothesisReport check_hypotheses(const DoubleSpec& d, const HypothesisOptions& options = {});

/// Quotient of the Bass-Serre tree of G *_A H by the kernel of psi: one vertex per side and
/// one edge per coset of pi(A) in H.
struct QuotientGraph {
  std::size_t g_vertices = 1;
  std::size_t h_vertices = 1;
  std::vector<Element> edges;  // coset representatives
  std::size_t components = 1;
  std::size_t betti = 0;

  bool connected() const { return components == 1; }
  /// "vertices G0 H0" then one "edge G0 H0 <rep>" line per coset.
  std::string adjacency(const GroupSpec& H) const;
};

/// Throws PreconditionError when a hypothesis fails or the index is infinite.
QuotientGraph quotient_graph(const Homomorphism& pi, std::span<const Element> A_generators,
                             const HypothesisOptions& options = {});
QuotientGraph quotient_graph(const DoubleSpec& d, const HypothesisOptions& options = {});

struct CircuitWitness {
  Element z;  // least element of H outside pi(A)
  Element x;  // least preimage of z
  std::vector<Syllable> letters;  // (G, x)(H, pi(x^-1))
  AmalgamWord h;
  Element psi_h;
  AmalgamWord x_inv_h;
  bool psi_trivial = false;
  bool x_outside_A = false;
  bool x_inv_h_in_H_minus_A = false;

  bool passed() const { return psi_trivial && x_outside_A && x_inv_h_in_H_minus_A; }
};

CircuitWitness witness_circuit(const DoubleSpec& d, std::size_t cutoff = 1u << 20);

}  // namespace amalgact
