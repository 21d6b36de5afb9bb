#include "amalgact/bass_serre.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "amalgact/error.hpp"

namespace amalgact {

namespace {

// Elements of <gens> by word length, canonical order inside each length; stops after `cutoff`.
std::vector<Element> subgroup_prefix(const GroupSpec& G, std::span<const Element> gens, std::size_t cutoff,
                                     bool& complete) {
  std::vector<Element> sym;
  for (const auto& g : gens) {
    sym.push_back(g);
    sym.push_back(inverse(g));
  }
  std::vector<Element> out{G.identity()};
  ElementSet seen{G.identity()};
  std::vector<Element> layer = out;
  complete = false;
  while (!layer.empty()) {
    std::vector<Element> next;
    for (const auto& x : layer) {
      for (const auto& s : sym) {
        auto y = multiply(x, s);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    }
    std::sort(next.begin(), next.end());
    for (const auto& y : next) {
      if (out.size() >= cutoff) return out;
      out.push_back(y);
    }
    layer = std::move(next);
  }
  complete = true;
  return out;
}

// Membership in the subgroup of H generated by `gens`: finite closure or a lattice.
std::function<bool(const Element&)> membership(const GroupSpec& H, std::vector<Element> gens, std::size_t cutoff) {
  try {
    auto elems = closure(H, gens, cutoff);
    auto set = std::make_shared<ElementSet>(elems.begin(), elems.end());
    return [set](const Element& h) { return set->count(h) != 0; };
  } catch (const SearchExhausted&) {
    if (H.kind() != GroupKind::FreeAbelian) {
      throw PreconditionError("pi(A) is infinite and H is not free abelian; membership is not decidable here");
    }
    std::vector<IntVector> vs;
    for (const auto& g : gens) vs.push_back(g.coords());
    auto lattice = std::make_shared<IntegerLattice>(H.rank(), std::move(vs));
    return [lattice](const Element& h) { return lattice->contains(h.coords()); };
  }
}

}  // namespace

HypothesisReport check_hypotheses(const Homomorphism& pi, std::span<const Element> A_generators,
                                  const HypothesisOptions& options) {
  const auto& G = pi.source();
  const auto& H = pi.target();
  HypothesisReport rep;

  std::vector<Element> gen_images;
  for (const auto& g : G.generators()) gen_images.push_back(pi(g));
  rep.surjective = generates(H, gen_images);
  if (!rep.surjective) rep.failures.push_back("pi is not surjective onto H");

  for (const auto& a : A_generators) {
    if (!G.owns(a)) throw GroupError("generator of A is not in G");
  }
  auto A = subgroup_prefix(G, A_generators, options.scan_cutoff, rep.a_finite);
  rep.a_scanned = A.size();
  std::unordered_map<Element, Element, ElementHash> first;
  rep.injective_on_A = true;
  for (const auto& a : A) {
    auto [it, fresh] = first.emplace(pi(a), a);
    if (!fresh) {
      rep.injective_on_A = false;
      rep.collision = std::make_pair(it->second, a);
      rep.failures.push_back("pi is not injective on A: pi(" + G.name(it->second) + ") = pi(" + G.name(a) + ")");
      break;
    }
  }

  std::vector<Element> piA_gens;
  for (const auto& a : A_generators) piA_gens.push_back(pi(a));
  auto in_piA = membership(H, piA_gens, options.scan_cutoff);
  if (!H.is_finite() && H.kind() == GroupKind::FreeAbelian) {
    std::vector<IntVector> vs;
    for (const auto& g : piA_gens) vs.push_back(g.coords());
    if (auto idx = IntegerLattice(H.rank(), std::move(vs)).index()) rep.index = static_cast<std::size_t>(*idx);
  }
  const std::size_t limit = H.order() ? *H.order() : options.scan_cutoff;
  const std::size_t want = rep.index ? *rep.index : (H.is_finite() ? limit : 2);
  for (std::size_t i = 0; i < limit && rep.coset_reps.size() < want; ++i) {
    Element h = H.element_at(i);
    bool known = std::any_of(rep.coset_reps.begin(), rep.coset_reps.end(),
                             [&](const Element& r) { return in_piA(multiply(inverse(r), h)); });
    if (!known) rep.coset_reps.push_back(std::move(h));
  }
  if (H.is_finite()) rep.index = rep.coset_reps.size();
  rep.index_ok = rep.coset_reps.size() >= 2;
  if (!rep.index_ok) rep.failures.push_back("[H : pi(A)] = 1");
  return rep;
}

HypothesisReport check_hypotheses(const DoubleSpec& d, const HypothesisOptions& options) {
  return check_hypotheses(d.pi(), d.base().A(Side::G).elements(), options);
}

std::string QuotientGraph::adjacency(const GroupSpec& H) const {
  std::string out = "vertices G0 H0\n";
  for (const auto& e : edges) out += "edge G0 H0 " + H.name(e) + "\n";
  return out;
}

QuotientGraph quotient_graph(const Homomorphism& pi, std::span<const Element> A_generators,
                             const HypothesisOptions& options) {
  auto rep = check_hypotheses(pi, A_generators, options);
  if (!rep.passed()) throw PreconditionError("hypotheses fail: " + rep.failures.front());
  if (!rep.index || rep.coset_reps.size() != *rep.index) {
    throw PreconditionError("[H : pi(A)] is infinite or was not enumerated within the cutoff");
  }
  QuotientGraph g;
  g.edges = std::move(rep.coset_reps);
  g.betti = g.edges.size() - (g.g_vertices + g.h_vertices) + g.components;
  return g;
}

QuotientGraph quotient_graph(const DoubleSpec& d, const HypothesisOptions& options) {
  return quotient_graph(d.pi(), d.base().A(Side::G).elements(), options);
}

CircuitWitness witness_circuit(const DoubleSpec& d, std::size_t cutoff) {
  const auto& spec = d.base();
  const auto& G = spec.G();
  const auto& H = spec.H();
  const auto& AH = spec.A(Side::H);

  // least element: canonical minimum for finite groups, enumeration order otherwise
  auto least = [cutoff](const GroupSpec& K, auto pred) -> std::optional<Element> {
    std::optional<Element> best;
    const std::size_t limit = K.order() ? *K.order() : cutoff;
    for (std::size_t i = 0; i < limit; ++i) {
      Element k = K.element_at(i);
      if (!pred(k)) continue;
      if (!K.is_finite()) return k;
      if (!best || k < *best) best = std::move(k);
    }
    return best;
  };

  auto z = least(H, [&](const Element& h) { return !AH.contains(h); });
  if (!z) throw SearchExhausted("no element of H outside pi(A) within the cutoff");
  auto x = least(G, [&](const Element& g) { return d.pi()(g) == *z; });
  if (!x) throw SearchExhausted("no preimage of " + H.name(*z) + " within the cutoff");

  std::vector<Syllable> letters{{Side::G, *x}, {Side::H, d.pi()(inverse(*x))}};
  auto h = reduce(spec, letters);
  std::vector<Syllable> xinv{{Side::G, inverse(*x)}};
  auto x_inv_h = amalgam_multiply(reduce(spec, xinv), h);
  CircuitWitness w{*z, *x, letters, h, psi(d, h), x_inv_h};
  w.psi_trivial = w.psi_h == H.identity();
  w.x_outside_A = !spec.A(Side::G).contains(*x);
  w.x_inv_h_in_H_minus_A =
      x_inv_h.length() == 1 && x_inv_h.syllables()[0].side == Side::H &&
      !AH.contains(multiply(spec.phi(x_inv_h.head()), x_inv_h.syllables()[0].element));
  return w;
}

}  // namespace amalgact
