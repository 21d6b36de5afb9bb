#include "amalgact/actions.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "amalgact/error.hpp"

namespace amalgact {

namespace detail {

constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();

struct SpaceImpl {
  PointSpace::Kind kind;
  std::optional<GroupSpec> group;
  std::optional<FiniteSubgroup> K;
  std::optional<Homomorphism> f;
  std::vector<PointSpace> parts;
  std::optional<std::size_t> size;

  // Cosets: representatives in order of first appearance. Quotient: the image, sorted.
  mutable std::mutex mu;
  mutable std::vector<Element> reps;
  mutable std::unordered_map<Element, PointId, ElementHash> rep_pos;
  mutable std::size_t scanned = 0;

  // Copies: ends[t] is the end of chunk t of the base, before[s] the number of points on
  // diagonals < s. Both grow on demand under `mu`.
  PointSpace::ChunkFn chunk_end;
  mutable std::vector<std::size_t> ends;
  mutable std::vector<std::size_t> before{0};

  bool chunks_done() const {
    auto n = parts[0].size();
    return n && !ends.empty() && ends.back() == *n;
  }
  void grow_chunks(std::size_t t) const {
    while (ends.size() <= t && !chunks_done()) {
      const std::size_t start = ends.empty() ? 0 : ends.back();
      const std::size_t e = chunk_end(start);
      auto n = parts[0].size();
      if (e <= start || (n && e > *n)) throw Error("copies: chunk ends must increase within the base");
      ends.push_back(e);
    }
  }
  // End of chunk u, constant past the last chunk of a finite base.
  std::size_t end_at(std::size_t u) const {
    grow_chunks(u);
    return ends[std::min(u, ends.size() - 1)];
  }
  std::size_t chunk_start(std::size_t t) const { return t == 0 ? 0 : ends[t - 1]; }
  std::size_t last_chunk(std::size_t s) const {
    grow_chunks(s);
    return std::min(s, ends.size() - 1);
  }
  void grow_diagonals(std::size_t s) const {
    while (before.size() <= s) before.push_back(before.back() + end_at(before.size() - 1));
  }

  std::size_t part_size(std::size_t c) const {
    auto s = parts[c].size();
    return s ? *s : kInfinite;
  }

  // Cosets: enumerate G until `stop` holds or G runs out.
  template <class Stop>
  void scan_cosets(Stop stop) const {
    const auto& G = *group;
    while (!stop()) {
      if (G.is_finite() && scanned >= *G.order()) return;
      auto r = coset_rep(G.element_at(scanned++), *K, CosetSide::Left);
      if (rep_pos.emplace(r, reps.size()).second) reps.push_back(std::move(r));
    }
  }
};

}  // namespace detail

using detail::kInfinite;

namespace {

// DisjointUnion layout: number of points in rounds before t.
std::size_t rounds_before(const detail::SpaceImpl& d, std::size_t t) {
  std::size_t total = 0;
  for (std::size_t c = 0; c < d.parts.size(); ++c) total += std::min(d.part_size(c), t);
  return total;
}

void check_point(const PointSpace& s, PointId p) {
  if (auto n = s.size(); n && p >= *n) {
    throw PreconditionError("point " + std::to_string(p) + " outside a space of size " + std::to_string(*n));
  }
}

}  // namespace

PointSpace PointSpace::regular(GroupSpec G) {
  auto d = std::make_shared<detail::SpaceImpl>();
  d->kind = Kind::Regular;
  d->size = G.order();
  d->group = std::move(G);
  return PointSpace(std::move(d));
}

PointSpace PointSpace::cosets(FiniteSubgroup K) {
  auto d = std::make_shared<detail::SpaceImpl>();
  d->kind = Kind::Cosets;
  d->group = K.ambient();
  if (auto n = K.ambient().order()) d->size = *n / K.size();
  d->K = std::move(K);
  return PointSpace(std::move(d));
}

PointSpace PointSpace::quotient(Homomorphism f) {
  if (!f.target().is_finite()) throw PreconditionError("quotient spaces need a finite target group");
  auto d = std::make_shared<detail::SpaceImpl>();
  d->kind = Kind::Quotient;
  d->group = f.target();
  d->reps = closure(f.target(), f.images());
  for (std::size_t i = 0; i < d->reps.size(); ++i) d->rep_pos.emplace(d->reps[i], i);
  d->size = d->reps.size();
  d->f = std::move(f);
  return PointSpace(std::move(d));
}

PointSpace PointSpace::disjoint_union(std::vector<PointSpace> parts) {
  if (parts.empty()) throw PreconditionError("disjoint union of no spaces");
  auto d = std::make_shared<detail::SpaceImpl>();
  d->kind = Kind::DisjointUnion;
  std::size_t total = 0;
  bool finite = true;
  for (const auto& p : parts) {
    if (auto n = p.size()) total += *n;
    else finite = false;
  }
  if (finite) d->size = total;
  d->parts = std::move(parts);
  return PointSpace(std::move(d));
}

PointSpace PointSpace::copies(PointSpace base, ChunkFn chunk_end) {
  if (base.size() == std::optional<std::size_t>{0}) throw PreconditionError("copies of an empty space");
  auto d = std::make_shared<detail::SpaceImpl>();
  d->kind = Kind::Copies;
  d->chunk_end = chunk_end ? std::move(chunk_end) : [](std::size_t start) { return start + 1; };
  d->parts.push_back(std::move(base));
  return PointSpace(std::move(d));
}

PointSpace::Kind PointSpace::kind() const { return impl_->kind; }
std::optional<std::size_t> PointSpace::size() const { return impl_->size; }
const std::vector<PointSpace>& PointSpace::parts() const { return impl_->parts; }

const GroupSpec& PointSpace::group() const {
  if (!impl_->group) throw PreconditionError("this point space has no carrier group");
  return *impl_->group;
}

Element PointSpace::element(PointId p) const {
  check_point(*this, p);
  switch (impl_->kind) {
    case Kind::Regular:
      return impl_->group->element_at(p);
    case Kind::Quotient:
      return impl_->reps[p];
    case Kind::Cosets: {
      std::lock_guard lock(impl_->mu);
      impl_->scan_cosets([&] { return impl_->reps.size() > p; });
      return impl_->reps.at(p);
    }
    default:
      throw PreconditionError("composite spaces have no element per point");
  }
}

PointId PointSpace::point_of(const Element& g) const {
  switch (impl_->kind) {
    case Kind::Regular:
      return impl_->group->index_of(g);
    case Kind::Quotient: {
      auto it = impl_->rep_pos.find(g);
      if (it == impl_->rep_pos.end()) throw PreconditionError("element outside the image of the quotient map");
      return it->second;
    }
    case Kind::Cosets: {
      auto r = coset_rep(g, *impl_->K, CosetSide::Left);
      std::lock_guard lock(impl_->mu);
      impl_->scan_cosets([&] { return impl_->rep_pos.count(r) != 0; });
      auto it = impl_->rep_pos.find(r);
      if (it == impl_->rep_pos.end()) throw GroupError("coset not found in enumeration");
      return it->second;
    }
    default:
      throw PreconditionError("composite spaces have no element per point");
  }
}

std::pair<std::size_t, PointId> PointSpace::split(PointId p) const {
  check_point(*this, p);
  const auto& d = *impl_;
  if (d.kind == Kind::Copies) {
    std::lock_guard lock(d.mu);
    while (d.before.back() <= p) d.grow_diagonals(d.before.size());
    const std::size_t s = static_cast<std::size_t>(std::upper_bound(d.before.begin(), d.before.end(), p) -
                                                   d.before.begin()) - 1;
    const std::size_t r = p - d.before[s];
    // pairs on diagonal s run t = tmax, tmax - 1, ..., 0
    const std::size_t tmax = d.last_chunk(s);
    const std::size_t target = d.ends[tmax] - r;
    const std::size_t t = static_cast<std::size_t>(
        std::lower_bound(d.ends.begin(), d.ends.begin() + static_cast<std::ptrdiff_t>(tmax) + 1, target) -
        d.ends.begin());
    return {s - t, d.chunk_start(t) + (r - (d.ends[tmax] - d.ends[t]))};
  }
  if (d.kind == Kind::DisjointUnion) {
    std::size_t lo = 0, hi = 1;
    while (rounds_before(d, hi) <= p) hi *= 2;
    while (hi - lo > 1) {
      std::size_t mid = lo + (hi - lo) / 2;
      (rounds_before(d, mid) <= p ? lo : hi) = mid;
    }
    std::size_t r = p - rounds_before(d, lo);
    for (std::size_t c = 0; c < d.parts.size(); ++c) {
      if (d.part_size(c) > lo && r-- == 0) return {c, lo};
    }
    throw Error("disjoint union layout is inconsistent");
  }
  throw PreconditionError("split needs a disjoint union or copies space");
}

PointId PointSpace::join(std::size_t component, PointId inner) const {
  const auto& d = *impl_;
  if (d.kind == Kind::Copies) {
    check_point(d.parts[0], inner);
    std::lock_guard lock(d.mu);
    while (d.ends.empty() || d.ends.back() <= inner) d.grow_chunks(d.ends.size());
    const std::size_t t =
        static_cast<std::size_t>(std::upper_bound(d.ends.begin(), d.ends.end(), inner) - d.ends.begin());
    const std::size_t s = component + t;
    d.grow_diagonals(s);
    const std::size_t tmax = d.last_chunk(s);
    return d.before[s] + (d.ends[tmax] - d.ends[t]) + (inner - d.chunk_start(t));
  }
  if (d.kind == Kind::DisjointUnion) {
    if (component >= d.parts.size()) throw PreconditionError("no such component in disjoint union");
    check_point(d.parts[component], inner);
    std::size_t id = rounds_before(d, inner);
    for (std::size_t c = 0; c < component; ++c) id += d.part_size(c) > inner ? 1 : 0;
    return id;
  }
  throw PreconditionError("join needs a disjoint union or copies space");
}

std::string PointSpace::name(PointId p) const {
  switch (impl_->kind) {
    case Kind::Regular:
    case Kind::Quotient:
      return group().name(element(p));
    case Kind::Cosets:
      return "[" + group().name(element(p)) + "]";
    case Kind::DisjointUnion: {
      auto [c, i] = split(p);
      return std::to_string(c) + "/" + impl_->parts[c].name(i);
    }
    case Kind::Copies: {
      auto [c, i] = split(p);
      return "#" + std::to_string(c) + "/" + impl_->parts[0].name(i);
    }
  }
  return {};
}

ActionSpec ActionSpec::regular(GroupSpec G) {
  auto space = PointSpace::regular(G);
  Fn fn = [G](const Element& g, PointId x) { return G.index_of(multiply(g, G.element_at(x))); };
  return ActionSpec(std::move(G), std::move(space), std::make_shared<const Fn>(std::move(fn)));
}

ActionSpec ActionSpec::cosets(FiniteSubgroup K) {
  GroupSpec G = K.ambient();
  auto space = PointSpace::cosets(std::move(K));
  Fn fn = [space](const Element& g, PointId x) { return space.point_of(multiply(g, space.element(x))); };
  return ActionSpec(std::move(G), space, std::make_shared<const Fn>(std::move(fn)));
}

ActionSpec ActionSpec::quotient(Homomorphism f) {
  GroupSpec G = f.source();
  auto space = PointSpace::quotient(f);
  Fn fn = [space, f](const Element& g, PointId x) { return space.point_of(multiply(f(g), space.element(x))); };
  return ActionSpec(std::move(G), space, std::make_shared<const Fn>(std::move(fn)));
}

ActionSpec ActionSpec::disjoint_union(std::vector<ActionSpec> parts) {
  if (parts.empty()) throw PreconditionError("disjoint union of no actions");
  std::vector<PointSpace> spaces;
  for (const auto& p : parts) {
    if (!(p.group() == parts[0].group())) throw PreconditionError("disjoint union of actions of different groups");
    spaces.push_back(p.space());
  }
  auto space = PointSpace::disjoint_union(std::move(spaces));
  GroupSpec G = parts[0].group();
  Fn fn = [space, parts](const Element& g, PointId x) {
    auto [c, i] = space.split(x);
    return space.join(c, parts[c].act(g, i));
  };
  return ActionSpec(std::move(G), space, std::make_shared<const Fn>(std::move(fn)));
}

ActionSpec ActionSpec::copies(ActionSpec base, PointSpace::ChunkFn chunk_end) {
  auto space = PointSpace::copies(base.space(), std::move(chunk_end));
  GroupSpec G = base.group();
  Fn fn = [space, base](const Element& g, PointId x) {
    auto [c, i] = space.split(x);
    return space.join(c, base.act(g, i));
  };
  return ActionSpec(std::move(G), space, std::make_shared<const Fn>(std::move(fn)));
}

ActionSpec ActionSpec::custom(GroupSpec G, PointSpace space, Fn fn) {
  return ActionSpec(std::move(G), std::move(space), std::make_shared<const Fn>(std::move(fn)));
}

PointId ActionSpec::act(const Element& g, PointId x) const {
  if (!group_.owns(g)) throw GroupError("acting element is not in the acting group");
  return (*fn_)(g, x);
}

std::vector<PointId> orbit(const ActionSpec& act, PointId x, std::size_t depth) {
  std::unordered_set<PointId> seen{x};
  std::vector<PointId> layer{x};
  for (std::size_t r = 0; r < depth && !layer.empty(); ++r) {
    std::vector<PointId> next;
    for (auto p : layer) {
      for (const auto& s : act.group().symmetric_generators()) {
        auto q = act.act(s, p);
        if (seen.insert(q).second) next.push_back(q);
      }
    }
    layer = std::move(next);
  }
  std::vector<PointId> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

TransitivityVerdict is_transitive(const ActionSpec& act, std::size_t prefix, std::size_t depth, PointId start) {
  TransitivityVerdict v;
  v.start = start;
  v.prefix = act.space().size() ? std::min(prefix, *act.space().size()) : prefix;
  v.depth = depth;
  std::size_t missing = 0;
  std::vector<bool> found(v.prefix, false);
  auto mark = [&](PointId p) {
    if (p < v.prefix && !found[p]) {
      found[p] = true;
      --missing;
    }
  };
  missing = v.prefix;
  std::unordered_set<PointId> seen{start};
  std::vector<PointId> layer{start};
  mark(start);
  std::size_t r = 0;
  while (missing > 0 && r < depth && !layer.empty()) {
    std::vector<PointId> next;
    for (auto p : layer) {
      for (const auto& s : act.group().symmetric_generators()) {
        auto q = act.act(s, p);
        if (seen.insert(q).second) {
          next.push_back(q);
          mark(q);
        }
      }
    }
    layer = std::move(next);
    ++r;
  }
  v.depth_used = r;
  v.certified = missing == 0;
  if (!v.certified) {
    for (std::size_t p = 0; p < v.prefix; ++p) {
      if (!found[p]) {
        v.counterexample = p;
        break;
      }
    }
  }
  return v;
}

std::vector<PointId> supp_A(const ActionSpec& act, const FiniteSubgroup& A, const Element& g, std::size_t prefix) {
  if (!(A.ambient() == act.group())) throw GroupError("supp_A: A is not a subgroup of the acting group");
  const std::size_t n = act.space().size() ? std::min(prefix, *act.space().size()) : prefix;
  std::vector<PointId> out;
  std::unordered_set<PointId> orb;
  for (PointId x = 0; x < n; ++x) {
    orb.clear();
    for (const auto& a : A.elements()) orb.insert(act.act(a, x));
    bool disjoint = true;
    for (auto y : orb) {
      if (orb.count(act.act(g, y))) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) out.push_back(x);
  }
  return out;
}

namespace detail {

struct BlockImpl {
  BlockImpl(ActionSpec a, FiniteSubgroup sub) : act(std::move(a)), A(std::move(sub)) {}

  ActionSpec act;
  FiniteSubgroup A;
  std::mutex mu;
  std::vector<PointId> bases;
  std::unordered_map<PointId, std::size_t> base_index;
  std::size_t scanned = 0;

  std::vector<PointId> block_of(PointId p) const {
    std::vector<PointId> out;
    out.reserve(A.size());
    for (const auto& a : A.elements()) out.push_back(act.act(a, p));
    auto sorted = out;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw PreconditionError("A does not act freely: point " + act.space().name(p) + " has a nontrivial stabilizer");
    }
    return out;
  }

  PointId base(PointId p) const {
    auto b = block_of(p);
    return *std::min_element(b.begin(), b.end());
  }

  // Scans one more point; false when a finite space is exhausted. Caller holds mu.
  bool scan_one() {
    if (auto n = act.space().size(); n && scanned >= *n) return false;
    PointId p = scanned++;
    if (base(p) == p) {
      base_index.emplace(p, bases.size());
      bases.push_back(p);
    }
    return true;
  }
};

}  // namespace detail

ABlockSpace::ABlockSpace(ActionSpec act, FiniteSubgroup A) {
  if (!(A.ambient() == act.group())) throw GroupError("ABlockSpace: A is not a subgroup of the acting group");
  impl_ = std::make_shared<detail::BlockImpl>(std::move(act), std::move(A));
}

const ActionSpec& ABlockSpace::action() const { return impl_->act; }
const FiniteSubgroup& ABlockSpace::A() const { return impl_->A; }
std::vector<PointId> ABlockSpace::block_of(PointId p) const { return impl_->block_of(p); }
PointId ABlockSpace::base(PointId p) const { return impl_->base(p); }

std::size_t ABlockSpace::block_index(PointId p) const {
  PointId b = base(p);
  std::lock_guard lock(impl_->mu);
  while (impl_->scanned <= b) impl_->scan_one();
  return impl_->base_index.at(b);
}

PointId ABlockSpace::block_base(std::size_t k) const {
  std::lock_guard lock(impl_->mu);
  while (impl_->bases.size() <= k) {
    if (!impl_->scan_one()) throw SearchExhausted("block " + std::to_string(k) + " past the end of a finite space");
  }
  return impl_->bases[k];
}

Element ABlockSpace::offset(PointId p) const {
  PointId b = base(p);
  for (const auto& a : impl_->A.elements()) {
    if (impl_->act.act(a, b) == p) return a;
  }
  throw Error("point not in the orbit of its base");
}

std::size_t ABlockSpace::saturate(std::size_t prefix) const {
  const auto size = impl_->act.space().size();
  std::size_t n = size ? std::min(prefix, *size) : prefix;
  std::size_t checked = 0;
  while (checked < n) {
    for (; checked < n; ++checked) {
      for (auto q : block_of(checked)) n = std::max(n, q + 1);
    }
  }
  return n;
}

FreenessVerdict is_free(const ActionSpec& act, const FiniteSubgroup& A, std::size_t prefix) {
  FreenessVerdict v;
  const auto size = act.space().size();
  std::size_t n = size ? std::min(prefix, *size) : prefix;
  const Element e = A.ambient().identity();
  for (std::size_t checked = 0; checked < n; ++checked) {
    for (const auto& a : A.elements()) {
      if (a == e) continue;
      auto q = act.act(a, checked);
      if (q == checked) {
        v.prefix = n;
        v.fixed = std::make_pair(a, checked);
        return v;
      }
      n = std::max(n, q + 1);
    }
  }
  v.prefix = n;
  v.free = true;
  v.blocks = ABlockSpace(act, A);
  return v;
}

namespace {

struct Alignment {
  AmalgamSpec spec;
  ActionSpec x_G, y_H;
  ABlockSpace xb, yb;

  PointId to_y(PointId x) const {
    auto k = xb.block_index(x);
    return y_H.act(spec.phi(xb.offset(x)), yb.block_base(k));
  }
  PointId to_x(PointId y) const {
    auto k = yb.block_index(y);
    return x_G.act(spec.phi_inverse(yb.offset(y)), xb.block_base(k));
  }
};

}  // namespace

AprimeWitness build_aprime_witness(const AmalgamSpec& spec, const ActionSpec& Y, std::size_t prefix) {
  if (spec.G().is_finite()) throw PreconditionError("the G factor must be infinite for X = Regular(G)");
  if (!(Y.group() == spec.H())) throw PreconditionError("Y must be a space acted on by the H factor");
  auto freeness = is_free(Y, spec.A(Side::H), prefix);
  if (!freeness.free) {
    throw PreconditionError("A does not act freely on Y: " + spec.H().name(freeness.fixed->first) + " fixes point " +
                            Y.space().name(freeness.fixed->second));
  }
  auto x_G = ActionSpec::regular(spec.G());
  // chunks of Y closed under A, so that A-blocks never straddle two diagonals of Copies(Y)
  ABlockSpace y_base_blocks(Y, spec.A(Side::H));
  auto chunks = [y_base_blocks](std::size_t start) { return y_base_blocks.saturate(start + 1); };
  auto y_H = ActionSpec::disjoint_union({ActionSpec::regular(spec.H()), ActionSpec::copies(Y, chunks)});
  ABlockSpace xb(x_G, spec.A(Side::G));
  ABlockSpace yb(y_H, spec.A(Side::H));
  Alignment al{spec, x_G, y_H, xb, yb};
  auto x_H = ActionSpec::custom(spec.H(), x_G.space(),
                                [al](const Element& h, PointId x) { return al.to_x(al.y_H.act(h, al.to_y(x))); });
  return AprimeWitness(spec, std::move(x_G), std::move(y_H), std::move(x_H), Y, std::move(xb), std::move(yb));
}

PointId AprimeWitness::to_y(PointId x) const {
  auto k = x_blocks_.block_index(x);
  return y_H_.act(spec_.phi(x_blocks_.offset(x)), y_blocks_.block_base(k));
}

PointId AprimeWitness::to_x(PointId y) const {
  auto k = y_blocks_.block_index(y);
  return x_G_.act(spec_.phi_inverse(y_blocks_.offset(y)), x_blocks_.block_base(k));
}

PointId AprimeWitness::copy_point(std::size_t c, PointId p) const {
  const auto& copies = y_H_.space().parts()[1];
  return y_H_.space().join(1, copies.join(c, p));
}

}  // namespace amalgact
