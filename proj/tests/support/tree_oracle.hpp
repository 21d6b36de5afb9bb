#pragma once

// Independent cross-check for the quotient graph of a double: walk the Bass-Serre tree of
// G *_A H out to a fixed syllable radius and push every vertex wG, wH and edge wA through
// psi into H, where the kernel orbits become cosets.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "amalgact/amalgam.hpp"

namespace oracle {

struct TreeQuotient {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t components = 0;
  long betti() const { return static_cast<long>(edges) - static_cast<long>(vertices) + static_cast<long>(components); }
};

inline TreeQuotient truncated_tree_quotient(const amalgact::DoubleSpec& d, std::size_t radius) {
  using namespace amalgact;
  const auto& spec = d.base();
  const auto& pi = d.pi();
  const auto& H = spec.H();
  const auto n = *H.order();

  // psi by plain multiplication of the flattened letters
  auto image = [&](const AmalgamWord& w) {
    Element acc = H.identity();
    for (const auto& s : flatten(w)) acc = multiply(acc, s.side == Side::G ? pi(s.element) : s.element);
    return acc;
  };
  auto coset = [&](const Element& h, const std::vector<Element>& sub) {
    std::set<std::size_t> out;
    for (const auto& k : sub) out.insert(H.index_of(multiply(h, k)));
    return out;
  };
  std::vector<Element> piG, piA, allH;
  for (std::size_t i = 0; i < *spec.G().order(); ++i) piG.push_back(pi(spec.G().element_at(i)));
  for (const auto& a : spec.A(Side::G).elements()) piA.push_back(pi(a));
  for (std::size_t i = 0; i < n; ++i) allH.push_back(H.element_at(i));

  std::map<std::set<std::size_t>, std::size_t> gv, hv;
  std::set<std::set<std::size_t>> edge_images;
  std::vector<std::pair<std::size_t, std::size_t>> links;  // (G-vertex, H-vertex) per edge image
  for (const auto& w : enumerate_words(spec, radius)) {
    const Element p = image(w);
    auto g = gv.emplace(coset(p, piG), gv.size()).first->second;
    auto h = hv.emplace(coset(p, allH), hv.size()).first->second;
    if (edge_images.insert(coset(p, piA)).second) links.push_back({g, h});
  }

  TreeQuotient q;
  q.vertices = gv.size() + hv.size();
  q.edges = edge_images.size();
  std::vector<std::size_t> parent(q.vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [g, h] : links) parent[find(g)] = find(gv.size() + h);
  for (std::size_t v = 0; v < q.vertices; ++v) q.components += find(v) == v;
  return q;
}

}  // namespace oracle
