#include "amalgact/groups.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>

#include "amalgact/error.hpp"

namespace amalgact {

namespace detail {

struct GroupImpl {
  GroupKind kind{};
  std::size_t width = 0;

  // FiniteTable
  std::size_t n = 0;
  std::vector<std::uint32_t> table;  // row-major n*n
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> name_index;
  std::size_t identity_index = 0;
  std::vector<std::size_t> inverse_index;
  std::vector<std::vector<std::size_t>> words;  // factorization per element

  // FreeAbelian
  std::size_t rank = 0;
  std::optional<IntegerLattice> lattice;

  // DirectProduct
  std::vector<GroupSpec> components;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> gen_offsets;

  std::vector<Element> gens;
  std::vector<Element> sym_gens;
  Element ident;
  std::optional<std::size_t> order;

  // Lazily materialized enumeration, guarded by mu.
  mutable std::mutex mu;
  mutable std::vector<Element> cache;
  mutable std::unordered_map<IntVector, std::size_t, IntVectorHash> pos;
  mutable bool complete = false;
  mutable std::vector<IntVector> frontier;  // FreeAbelian: last BFS shell
  mutable std::size_t next_diagonal = 0;    // DirectProduct

  std::size_t mul_index(std::size_t a, std::size_t b) const { return table[a * n + b]; }

  IntVector mul(const IntVector& a, const IntVector& b) const;
  IntVector inv(const IntVector& a) const;
  bool extend() const;  // one enumeration step; false once complete
  void push(IntVector v) const;
};

IntVector GroupImpl::mul(const IntVector& a, const IntVector& b) const {
  switch (kind) {
    case GroupKind::FiniteTable:
      return {static_cast<std::int64_t>(
          mul_index(static_cast<std::size_t>(a[0]), static_cast<std::size_t>(b[0])))};
    case GroupKind::FreeAbelian: {
      IntVector r(rank);
      for (std::size_t i = 0; i < rank; ++i) {
        if (__builtin_add_overflow(a[i], b[i], &r[i])) throw GroupError("integer overflow");
      }
      return r;
    }
    case GroupKind::DirectProduct: {
      IntVector r;
      r.reserve(width);
      for (std::size_t c = 0; c < components.size(); ++c) {
        const auto* ci = components[c].id();
        IntVector x(a.begin() + static_cast<std::ptrdiff_t>(offsets[c]),
                    a.begin() + static_cast<std::ptrdiff_t>(offsets[c] + ci->width));
        IntVector y(b.begin() + static_cast<std::ptrdiff_t>(offsets[c]),
                    b.begin() + static_cast<std::ptrdiff_t>(offsets[c] + ci->width));
        auto z = ci->mul(x, y);
        r.insert(r.end(), z.begin(), z.end());
      }
      return r;
    }
  }
  return {};
}

IntVector GroupImpl::inv(const IntVector& a) const {
  switch (kind) {
    case GroupKind::FiniteTable:
      return {static_cast<std::int64_t>(inverse_index[static_cast<std::size_t>(a[0])])};
    case GroupKind::FreeAbelian: {
      IntVector r(a);
      for (auto& x : r) x = -x;
      return r;
    }
    case GroupKind::DirectProduct: {
      IntVector r;
      r.reserve(width);
      for (std::size_t c = 0; c < components.size(); ++c) {
        const auto* ci = components[c].id();
        IntVector x(a.begin() + static_cast<std::ptrdiff_t>(offsets[c]),
                    a.begin() + static_cast<std::ptrdiff_t>(offsets[c] + ci->width));
        auto z = ci->inv(x);
        r.insert(r.end(), z.begin(), z.end());
      }
      return r;
    }
  }
  return {};
}

void GroupImpl::push(IntVector v) const {
  pos.emplace(v, cache.size());
  cache.emplace_back(this, std::move(v));
}

bool GroupImpl::extend() const {
  if (complete) return false;
  switch (kind) {
    case GroupKind::FiniteTable:
      for (std::size_t i = 0; i < n; ++i) push({static_cast<std::int64_t>(i)});
      complete = true;
      return true;
    case GroupKind::FreeAbelian: {
      if (cache.empty()) {
        push(IntVector(rank, 0));
        frontier = {IntVector(rank, 0)};
        return true;
      }
      std::vector<IntVector> shell;
      std::unordered_set<IntVector, IntVectorHash> fresh;
      for (const auto& x : frontier) {
        for (const auto& s : sym_gens) {
          auto y = mul(x, s.coords());
          if (pos.count(y) || fresh.count(y)) continue;
          fresh.insert(y);
          shell.push_back(std::move(y));
        }
      }
      std::sort(shell.begin(), shell.end());
      for (const auto& y : shell) push(y);
      frontier = std::move(shell);
      return true;
    }
    case GroupKind::DirectProduct: {
      // All index tuples with sum == next_diagonal, lexicographic.
      const std::size_t k = components.size();
      std::vector<std::optional<std::size_t>> sizes(k);
      std::size_t max_diag = 0;
      bool all_finite = true;
      for (std::size_t c = 0; c < k; ++c) {
        sizes[c] = components[c].order();
        if (sizes[c]) {
          max_diag += *sizes[c] - 1;
        } else {
          all_finite = false;
        }
      }
      if (all_finite && next_diagonal > max_diag) {
        complete = true;
        return false;
      }
      const std::size_t d = next_diagonal++;
      std::vector<std::size_t> idx(k, 0);
      auto emit = [&](auto&& self, std::size_t c, std::size_t remaining) -> void {
        const std::size_t limit = sizes[c] ? std::min(remaining, *sizes[c] - 1) : remaining;
        if (c + 1 == k) {
          if (remaining > limit) return;
          idx[c] = remaining;
          IntVector v;
          v.reserve(width);
          for (std::size_t j = 0; j < k; ++j) {
            const Element ej = components[j].element_at(idx[j]);
            const auto& e = ej.coords();
            v.insert(v.end(), e.begin(), e.end());
          }
          push(std::move(v));
          return;
        }
        for (std::size_t i = 0; i <= limit; ++i) {
          idx[c] = i;
          self(self, c + 1, remaining - i);
        }
      };
      emit(emit, 0, d);
      return true;
    }
  }
  return false;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return s.find_first_of(" \t\n|:,()") == std::string::npos;
}

std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw GroupError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

using detail::GroupImpl;

namespace {

const GroupImpl& require_owner(const Element& g) {
  if (g.owner() == nullptr) throw GroupError("element has no owning group");
  return *g.owner();
}

void finish_generators(GroupImpl& impl) {
  impl.sym_gens = impl.gens;
  for (const auto& g : impl.gens) {
    Element gi(&impl, impl.inv(g.coords()));
    if (std::find(impl.sym_gens.begin(), impl.sym_gens.end(), gi) == impl.sym_gens.end()) {
      impl.sym_gens.push_back(gi);
    }
  }
}

}  // namespace

GroupSpec GroupSpec::finite_table(std::vector<std::string> names,
                                  std::vector<std::vector<std::size_t>> table,
                                  std::vector<std::size_t> generators) {
  const std::size_t n = table.size();
  if (n == 0) throw GroupError("group table is empty");
  if (names.size() != n) throw GroupError("group table: names and rows differ in count");
  auto impl = std::make_shared<GroupImpl>();
  impl->kind = GroupKind::FiniteTable;
  impl->width = 1;
  impl->n = n;
  impl->table.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i].size() != n) throw GroupError("group table row " + std::to_string(i) + " has wrong length");
    std::vector<bool> seen(n, false);
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = table[i][j];
      if (v >= n) throw GroupError("group table entry out of range in row " + std::to_string(i));
      if (seen[v]) throw GroupError("group table row " + std::to_string(i) + " is not a permutation");
      seen[v] = true;
      impl->table[i * n + j] = static_cast<std::uint32_t>(v);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = table[i][j];
      if (seen[v]) throw GroupError("group table column " + std::to_string(j) + " is not a permutation");
      seen[v] = true;
    }
  }
  std::optional<std::size_t> e;
  for (std::size_t i = 0; i < n && !e; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) ok = impl->mul_index(i, j) == j && impl->mul_index(j, i) == j;
    if (ok) e = i;
  }
  if (!e) throw GroupError("group table has no identity");
  impl->identity_index = *e;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto ab = impl->mul_index(a, b);
      for (std::size_t c = 0; c < n; ++c) {
        if (impl->mul_index(ab, c) != impl->mul_index(a, impl->mul_index(b, c))) {
          throw GroupError("group table is not associative at (" + names[a] + "," + names[b] + "," +
                           names[c] + ")");
        }
      }
    }
  }
  impl->inverse_index.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (impl->mul_index(a, b) == *e) impl->inverse_index[a] = b;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!detail::valid_name(names[i])) throw GroupError("invalid element name '" + names[i] + "'");
    if (!impl->name_index.emplace(names[i], i).second) {
      throw GroupError("duplicate element name '" + names[i] + "'");
    }
  }
  impl->names = std::move(names);
  if (generators.empty()) throw GroupError("generator list is empty");
  for (auto g : generators) {
    if (g >= n) throw GroupError("generator index out of range");
    impl->gens.emplace_back(impl.get(), IntVector{static_cast<std::int64_t>(g)});
  }
  // Closure BFS records one factorization per element.
  impl->words.assign(n, {});
  std::vector<bool> reached(n, false);
  reached[*e] = true;
  std::deque<std::size_t> queue{*e};
  std::size_t count = 1;
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < generators.size(); ++j) {
      auto y = impl->mul_index(x, generators[j]);
      if (reached[y]) continue;
      reached[y] = true;
      impl->words[y] = impl->words[x];
      impl->words[y].push_back(j);
      queue.push_back(y);
      ++count;
    }
  }
  if (count != n) throw GroupError("generators do not generate the table group");
  impl->ident = Element(impl.get(), {static_cast<std::int64_t>(*e)});
  impl->order = n;
  finish_generators(*impl);
  return GroupSpec(std::move(impl));
}

GroupSpec GroupSpec::cyclic(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) table[i][j] = (i + j) % n;
  }
  return finite_table(std::move(names), std::move(table), {n == 1 ? 0u : 1u});
}

GroupSpec GroupSpec::from_permutations(std::size_t degree,
                                       std::vector<std::vector<std::size_t>> generators) {
  using Perm = std::vector<std::size_t>;
  for (const auto& p : generators) {
    if (p.size() != degree) throw GroupError("permutation has wrong degree");
    Perm sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < degree; ++i) {
      if (sorted[i] != i) throw GroupError("not a permutation of 0..degree-1");
    }
  }
  auto compose = [](const Perm& p, const Perm& q) {
    Perm r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[q[i]];
    return r;
  };
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0);
  std::vector<Perm> elems{id};
  std::unordered_set<IntVector, IntVectorHash> seen{IntVector(id.begin(), id.end())};
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& g : generators) {
      auto y = compose(elems[i], g);
      if (seen.insert(IntVector(y.begin(), y.end())).second) elems.push_back(y);
    }
  }
  std::sort(elems.begin(), elems.end());
  std::map<Perm, std::size_t> index;
  for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = i;
  std::vector<std::string> names;
  for (const auto& p : elems) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (degree > 10 && i > 0) s.push_back('.');
      s += std::to_string(p[i]);
    }
    names.push_back(s);
  }
  const std::size_t n = elems.size();
  std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) table[i][j] = index.at(compose(elems[i], elems[j]));
  }
  std::vector<std::size_t> gens;
  for (const auto& g : generators) gens.push_back(index.at(g));
  if (gens.empty()) gens.push_back(0);
  return finite_table(std::move(names), std::move(table), std::move(gens));
}

GroupSpec GroupSpec::free_abelian(std::size_t rank) {
  std::vector<IntVector> gens;
  for (std::size_t i = 0; i < rank; ++i) {
    IntVector e(rank, 0);
    e[i] = 1;
    gens.push_back(e);
    e[i] = -1;
    gens.push_back(e);
  }
  return free_abelian(rank, std::move(gens));
}

GroupSpec GroupSpec::free_abelian(std::size_t rank, std::vector<IntVector> generators) {
  if (rank == 0) throw GroupError("free abelian rank must be positive");
  if (generators.empty()) throw GroupError("generator list is empty");
  auto impl = std::make_shared<GroupImpl>();
  impl->kind = GroupKind::FreeAbelian;
  impl->rank = rank;
  impl->width = rank;
  impl->lattice.emplace(rank, generators);
  if (impl->lattice->index() != std::optional<std::int64_t>(1)) {
    throw GroupError("generators do not span Z^" + std::to_string(rank));
  }
  for (auto& g : generators) impl->gens.emplace_back(impl.get(), std::move(g));
  impl->ident = Element(impl.get(), IntVector(rank, 0));
  finish_generators(*impl);
  return GroupSpec(std::move(impl));
}

GroupSpec GroupSpec::direct_product(std::vector<GroupSpec> components) {
  if (components.empty()) throw GroupError("direct product needs at least one component");
  auto impl = std::make_shared<GroupImpl>();
  impl->kind = GroupKind::DirectProduct;
  std::size_t offset = 0;
  std::optional<std::size_t> order = 1;
  for (const auto& c : components) {
    impl->offsets.push_back(offset);
    offset += c.id()->width;
    if (order && c.order()) {
      order = *order * *c.order();
    } else {
      order.reset();
    }
  }
  impl->width = offset;
  impl->order = order;
  impl->components = std::move(components);
  IntVector ident;
  for (const auto& c : impl->components) {
    const Element e0 = c.identity();
    const auto& e = e0.coords();
    ident.insert(ident.end(), e.begin(), e.end());
  }
  impl->ident = Element(impl.get(), ident);
  for (std::size_t ci = 0; ci < impl->components.size(); ++ci) {
    impl->gen_offsets.push_back(impl->gens.size());
    for (const auto& g : impl->components[ci].generators()) {
      IntVector v = ident;
      std::copy(g.coords().begin(), g.coords().end(),
                v.begin() + static_cast<std::ptrdiff_t>(impl->offsets[ci]));
      impl->gens.emplace_back(impl.get(), std::move(v));
    }
  }
  finish_generators(*impl);
  return GroupSpec(std::move(impl));
}

GroupKind GroupSpec::kind() const { return impl_->kind; }
std::optional<std::size_t> GroupSpec::order() const { return impl_->order; }

std::size_t GroupSpec::rank() const {
  if (impl_->kind != GroupKind::FreeAbelian) throw GroupError("rank() on a non free abelian group");
  return impl_->rank;
}

const std::vector<GroupSpec>& GroupSpec::components() const { return impl_->components; }
Element GroupSpec::identity() const { return impl_->ident; }
const std::vector<Element>& GroupSpec::generators() const { return impl_->gens; }
const std::vector<Element>& GroupSpec::symmetric_generators() const { return impl_->sym_gens; }

Element GroupSpec::element_at(std::size_t index) const {
  std::lock_guard lock(impl_->mu);
  while (impl_->cache.size() <= index) {
    if (!impl_->extend()) throw GroupError("enumeration index past the end of a finite group");
  }
  return impl_->cache[index];
}

std::size_t GroupSpec::index_of(const Element& g) const {
  if (!owns(g)) throw GroupError("element does not belong to this group");
  std::lock_guard lock(impl_->mu);
  for (;;) {
    if (auto it = impl_->pos.find(g.coords()); it != impl_->pos.end()) return it->second;
    if (!impl_->extend()) throw GroupError("element not found in enumeration");
  }
}

bool GroupSpec::owns(const Element& g) const noexcept { return g.owner() == impl_.get(); }

Element GroupSpec::table_element(std::size_t index) const {
  if (impl_->kind != GroupKind::FiniteTable || index >= impl_->n) {
    throw GroupError("table index out of range");
  }
  return Element(impl_.get(), {static_cast<std::int64_t>(index)});
}

Element GroupSpec::vector_element(IntVector v) const {
  if (impl_->kind != GroupKind::FreeAbelian || v.size() != impl_->rank) {
    throw GroupError("vector does not match the free abelian rank");
  }
  return Element(impl_.get(), std::move(v));
}

Element GroupSpec::tuple(const std::vector<Element>& parts) const {
  if (impl_->kind != GroupKind::DirectProduct || parts.size() != impl_->components.size()) {
    throw GroupError("tuple does not match the direct product");
  }
  IntVector v;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    if (!impl_->components[c].owns(parts[c])) throw GroupError("tuple component from a different group");
    v.insert(v.end(), parts[c].coords().begin(), parts[c].coords().end());
  }
  return Element(impl_.get(), std::move(v));
}

Element GroupSpec::component(const Element& g, std::size_t i) const {
  if (!owns(g)) throw GroupError("element does not belong to this group");
  if (impl_->kind != GroupKind::DirectProduct || i >= impl_->components.size()) {
    throw GroupError("component index out of range");
  }
  const auto* ci = impl_->components[i].id();
  auto first = g.coords().begin() + static_cast<std::ptrdiff_t>(impl_->offsets[i]);
  return Element(ci, IntVector(first, first + static_cast<std::ptrdiff_t>(ci->width)));
}

std::string GroupSpec::name(const Element& g) const {
  if (!owns(g)) throw GroupError("element does not belong to this group");
  switch (impl_->kind) {
    case GroupKind::FiniteTable:
      return impl_->names[static_cast<std::size_t>(g.coords()[0])];
    case GroupKind::FreeAbelian: {
      if (impl_->rank == 1) return std::to_string(g.coords()[0]);
      std::string s = "(";
      for (std::size_t i = 0; i < impl_->rank; ++i) {
        if (i) s += ",";
        s += std::to_string(g.coords()[i]);
      }
      return s + ")";
    }
    case GroupKind::DirectProduct: {
      std::string s = "(";
      for (std::size_t c = 0; c < impl_->components.size(); ++c) {
        if (c) s += ",";
        s += impl_->components[c].name(component(g, c));
      }
      return s + ")";
    }
  }
  return {};
}

Element GroupSpec::parse(std::string_view text) const {
  auto strip = [&](std::string_view s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
      throw GroupError("expected parenthesized element: '" + std::string(text) + "'");
    }
    return s.substr(1, s.size() - 2);
  };
  switch (impl_->kind) {
    case GroupKind::FiniteTable: {
      auto it = impl_->name_index.find(std::string(text));
      if (it == impl_->name_index.end()) throw GroupError("unknown element name '" + std::string(text) + "'");
      return table_element(it->second);
    }
    case GroupKind::FreeAbelian: {
      if (impl_->rank == 1 && (text.empty() || text.front() != '(')) {
        return vector_element({detail::parse_int(text)});
      }
      auto parts = detail::split_top_level(strip(text));
      if (parts.size() != impl_->rank) throw GroupError("wrong number of coordinates in '" + std::string(text) + "'");
      IntVector v;
      for (const auto& p : parts) v.push_back(detail::parse_int(p));
      return vector_element(std::move(v));
    }
    case GroupKind::DirectProduct: {
      auto parts = detail::split_top_level(strip(text));
      if (parts.size() != impl_->components.size()) {
        throw GroupError("wrong number of components in '" + std::string(text) + "'");
      }
      std::vector<Element> elems;
      for (std::size_t c = 0; c < parts.size(); ++c) elems.push_back(impl_->components[c].parse(parts[c]));
      return tuple(elems);
    }
  }
  return {};
}

std::vector<GeneratorPower> GroupSpec::factorize(const Element& g) const {
  if (!owns(g)) throw GroupError("element does not belong to this group");
  std::vector<GeneratorPower> out;
  switch (impl_->kind) {
    case GroupKind::FiniteTable:
      for (auto j : impl_->words[static_cast<std::size_t>(g.coords()[0])]) out.emplace_back(j, 1);
      break;
    case GroupKind::FreeAbelian: {
      auto c = impl_->lattice->coefficients(g.coords());
      if (!c) throw GroupError("element outside the generated lattice");
      for (std::size_t j = 0; j < c->size(); ++j) {
        if ((*c)[j] != 0) out.emplace_back(j, (*c)[j]);
      }
      break;
    }
    case GroupKind::DirectProduct:
      for (std::size_t c = 0; c < impl_->components.size(); ++c) {
        for (auto [j, e] : impl_->components[c].factorize(component(g, c))) {
          out.emplace_back(impl_->gen_offsets[c] + j, e);
        }
      }
      break;
  }
  return out;
}

Element multiply(const Element& g, const Element& h) {
  const auto& owner = require_owner(g);
  if (g.owner() != h.owner()) throw GroupError("multiply: elements belong to different groups");
  return Element(&owner, owner.mul(g.coords(), h.coords()));
}

Element inverse(const Element& g) {
  const auto& owner = require_owner(g);
  return Element(&owner, owner.inv(g.coords()));
}

Element identity_of(const Element& g) { return require_owner(g).ident; }

Element power(const Element& g, std::int64_t k) {
  Element base = k < 0 ? inverse(g) : g;
  std::uint64_t e = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
  Element result = identity_of(g);
  while (e) {
    if (e & 1) result = multiply(result, base);
    e >>= 1;
    if (e) base = multiply(base, base);
  }
  return result;
}

std::vector<Element> enumerate(const GroupSpec& G, std::size_t count) {
  std::vector<Element> out;
  if (auto n = G.order()) count = std::min(count, *n);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(G.element_at(i));
  return out;
}

std::vector<Element> closure(const GroupSpec& G, std::span<const Element> gens, std::size_t cutoff) {
  std::vector<Element> steps;
  for (const auto& g : gens) {
    if (!G.owns(g)) throw GroupError("closure: generator from a different group");
    steps.push_back(g);
    steps.push_back(inverse(g));
  }
  std::vector<Element> out{G.identity()};
  ElementSet seen{G.identity()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& s : steps) {
      auto y = multiply(out[i], s);
      if (seen.insert(y).second) {
        if (out.size() >= cutoff) throw SearchExhausted("subgroup closure exceeded cutoff");
        out.push_back(std::move(y));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool generates(const GroupSpec& G, std::span<const Element> gens) {
  if (auto n = G.order()) return closure(G, gens, *n + 1).size() == *n;
  if (G.kind() == GroupKind::FreeAbelian) {
    std::vector<IntVector> vs;
    for (const auto& g : gens) {
      if (!G.owns(g)) throw GroupError("generates: element from a different group");
      vs.push_back(g.coords());
    }
    if (vs.empty()) return false;
    return IntegerLattice(G.rank(), std::move(vs)).index() == std::optional<std::int64_t>(1);
  }
  throw GroupError("generation test unsupported for infinite direct products");
}

FiniteSubgroup::FiniteSubgroup(GroupSpec ambient, std::vector<Element> elements)
    : ambient_(std::move(ambient)), elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (!ambient_.owns(elements_[i])) throw GroupError("subgroup element from a different group");
    if (!members_.emplace(elements_[i], i).second) {
      throw GroupError("duplicate subgroup element " + ambient_.name(elements_[i]));
    }
  }
  if (!contains(ambient_.identity())) throw GroupError("subgroup does not contain the identity");
  for (const auto& a : elements_) {
    if (!contains(inverse(a))) throw GroupError("subgroup not closed under inverse at " + ambient_.name(a));
    for (const auto& b : elements_) {
      if (!contains(multiply(a, b))) {
        throw GroupError("subgroup not closed under product at " + ambient_.name(a) + "*" + ambient_.name(b));
      }
    }
  }
}

FiniteSubgroup FiniteSubgroup::trivial(const GroupSpec& ambient) {
  return FiniteSubgroup(ambient, {ambient.identity()});
}

FiniteSubgroup FiniteSubgroup::generated_by(const GroupSpec& ambient, std::span<const Element> gens) {
  return FiniteSubgroup(ambient, closure(ambient, gens));
}

std::size_t FiniteSubgroup::position(const Element& a) const {
  auto it = members_.find(a);
  if (it == members_.end()) throw GroupError("element is not in the subgroup");
  return it->second;
}

Element coset_rep(const Element& g, const FiniteSubgroup& A, CosetSide side) {
  if (!A.ambient().owns(g)) throw GroupError("coset_rep: element outside the subgroup's ambient group");
  Element best;
  bool first = true;
  for (const auto& a : A.elements()) {
    Element x = side == CosetSide::Right ? multiply(a, g) : multiply(g, a);
    if (first || x < best) {
      best = std::move(x);
      first = false;
    }
  }
  return best;
}

namespace {

Element evaluate(const GroupSpec& source, const std::vector<Element>& images, const Element& target_id,
                 const Element& g) {
  Element r = target_id;
  for (auto [j, e] : source.factorize(g)) r = multiply(r, power(images[j], e));
  return r;
}

void check_relations(const GroupSpec& source, const GroupSpec& target, const std::vector<Element>& images) {
  const Element tid = target.identity();
  switch (source.kind()) {
    case GroupKind::FiniteTable: {
      const auto n = *source.order();
      std::vector<Element> img;
      img.reserve(n);
      for (std::size_t i = 0; i < n; ++i) img.push_back(evaluate(source, images, tid, source.table_element(i)));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          auto ij = multiply(source.table_element(i), source.table_element(j));
          if (img[static_cast<std::size_t>(ij.coords()[0])] != multiply(img[i], img[j])) {
            throw GroupError("homomorphism violates the table relation at (" +
                             source.name(source.table_element(i)) + "," +
                             source.name(source.table_element(j)) + ")");
          }
        }
      }
      break;
    }
    case GroupKind::FreeAbelian: {
      for (std::size_t i = 0; i < images.size(); ++i) {
        for (std::size_t j = i + 1; j < images.size(); ++j) {
          if (multiply(images[i], images[j]) != multiply(images[j], images[i])) {
            throw GroupError("images of free abelian generators do not commute");
          }
        }
      }
      // relations among the listed generators, e.g. e1 + (-e1) = 0
      std::vector<IntVector> gens;
      for (const auto& g : source.generators()) gens.push_back(g.coords());
      IntegerLattice lat(source.rank(), gens);
      for (const auto& rel : lat.relations()) {
        Element r = tid;
        for (std::size_t j = 0; j < rel.size(); ++j) r = multiply(r, power(images[j], rel[j]));
        if (r != tid) throw GroupError("homomorphism violates a linear relation among generators");
      }
      break;
    }
    case GroupKind::DirectProduct: {
      const auto& comps = source.components();
      std::vector<std::pair<std::size_t, std::size_t>> ranges;
      std::size_t off = 0;
      for (const auto& c : comps) {
        const auto k = c.generators().size();
        std::vector<Element> sub(images.begin() + static_cast<std::ptrdiff_t>(off),
                                 images.begin() + static_cast<std::ptrdiff_t>(off + k));
        check_relations(c, target, sub);
        ranges.emplace_back(off, off + k);
        off += k;
      }
      for (std::size_t a = 0; a < ranges.size(); ++a) {
        for (std::size_t b = a + 1; b < ranges.size(); ++b) {
          for (auto i = ranges[a].first; i < ranges[a].second; ++i) {
            for (auto j = ranges[b].first; j < ranges[b].second; ++j) {
              if (multiply(images[i], images[j]) != multiply(images[j], images[i])) {
                throw GroupError("images of different direct factors do not commute");
              }
            }
          }
        }
      }
      break;
    }
  }
}

}  // namespace

Homomorphism::Homomorphism(GroupSpec source, GroupSpec target, std::vector<Element> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
  if (images_.size() != source_.generators().size()) {
    throw GroupError("homomorphism needs one image per source generator");
  }
  for (const auto& x : images_) {
    if (!target_.owns(x)) throw GroupError("homomorphism image outside the target group");
  }
  check_relations(source_, target_, images_);
}

Homomorphism Homomorphism::identity(const GroupSpec& G) { return Homomorphism(G, G, G.generators()); }

Element Homomorphism::operator()(const Element& g) const {
  if (!source_.owns(g)) throw GroupError("apply_hom: element not in the source group");
  return evaluate(source_, images_, target_.identity(), g);
}

Element apply_hom(const Homomorphism& f, const Element& g) { return f(g); }

}  // namespace amalgact
