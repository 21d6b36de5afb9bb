#include "amalgact/folner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <unordered_set>

#include "amalgact/error.hpp"

namespace amalgact {

FolnerSet make_folner_set(std::vector<PointId> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

Rational ratio(const ActionSpec& act, const FolnerSet& C, const Element& g) {
  if (C.empty()) throw PreconditionError("Følner ratio of an empty set");
  std::unordered_set<PointId> in(C.begin(), C.end());
  std::int64_t out = 0;
  for (auto c : C) out += in.count(act.act(g, c)) ? 0 : 1;
  // g is a bijection, so |C xor gC| = 2 |gC \ C|
  return Rational(2 * out, static_cast<std::int64_t>(C.size()));
}

Rational ratio(std::span<const Element> C, const Element& g) {
  if (C.empty()) throw PreconditionError("Følner ratio of an empty set");
  ElementSet in(C.begin(), C.end());
  std::int64_t out = 0;
  for (const auto& c : C) out += in.count(multiply(g, c)) ? 0 : 1;
  return Rational(2 * out, static_cast<std::int64_t>(in.size()));
}

namespace {

template <class RatioFn>
FolnerReport make_report(std::span<const Element> F, Rational eps, RatioFn fn) {
  FolnerReport rep;
  rep.epsilon = eps;
  rep.test_set.assign(F.begin(), F.end());
  rep.verdict = true;
  for (const auto& g : F) {
    rep.ratios.push_back(fn(g));
    if (!(rep.ratios.back() < eps)) rep.verdict = false;
  }
  return rep;
}

struct StreamHit {
  std::size_t n;
  FolnerSet D;
};

StreamHit scan_stream(const ActionSpec& H_act, const FolnerStream& D_seq, const Rational& eps,
                      std::span<const Element> E, const Rational& lambda, std::size_t c0_size,
                      std::size_t max_stream) {
  const Rational quarter = eps / Rational(4);
  const Rational need = lambda * Rational(static_cast<std::int64_t>(c0_size));
  std::string last = "the stream is empty";
  for (std::size_t n = 1; n <= max_stream; ++n) {
    auto D = D_seq(n);
    if (!D) break;
    auto rep = is_folner(H_act, *D, E, quarter);
    const bool big = Rational(static_cast<std::int64_t>(D->size())) > need;
    if (rep.verdict && big) return {n, std::move(*D)};
    last = "term " + std::to_string(n) + " has |D_n| = " + std::to_string(D->size());
    if (!rep.verdict) last += " and is not (" + to_string(quarter) + ", E)-Følner";
    if (!big) last += " and |D_n| <= lambda |C0| = " + to_string(need);
  }
  throw SearchExhausted("no stream term is (eps/4, E)-Følner with |D_n| > lambda |C0| (eps = " + to_string(eps) +
                        "); " + last);
}

void finish_match(MatchResult& res, const ActionSpec& H_act, std::size_t c0_size, const Rational& eps,
                  std::span<const Element> E) {
  res.d = res.d_n.size() / c0_size;
  res.r = res.d_n.size() % c0_size;
  res.d_prime.assign(res.d_n.begin(), res.d_n.end() - static_cast<std::ptrdiff_t>(res.r));
  res.deleted.assign(res.d_n.end() - static_cast<std::ptrdiff_t>(res.r), res.d_n.end());
  res.d_report = is_folner(H_act, res.d_prime, E, eps);
  const auto dn = static_cast<std::int64_t>(res.d_n.size());
  res.size_ratio = Rational(dn, static_cast<std::int64_t>(res.d_prime.size()));
  res.deletion_ratio = Rational(static_cast<std::int64_t>(res.r), dn);
  res.bounds_hold = res.size_ratio < Rational(2) && res.deletion_ratio < eps / Rational(8);
}

Rational lambda_for(const Rational& eps) { return std::max(Rational(8) / eps, Rational(2)); }

}  // namespace

FolnerReport is_folner(const ActionSpec& act, const FolnerSet& C, std::span<const Element> F, Rational eps) {
  return make_report(F, eps, [&](const Element& g) { return ratio(act, C, g); });
}

FolnerReport is_folner(std::span<const Element> C, std::span<const Element> F, Rational eps) {
  return make_report(F, eps, [&](const Element& g) { return ratio(C, g); });
}

GroupMatch match_cardinalities(const GroupSpec& G, std::span<const Element> C0, const ActionSpec& H_act,
                               const FolnerStream& D_seq, Rational eps, std::span<const Element> F,
                               std::span<const Element> E, const MatchOptions& options) {
  if (C0.empty()) throw PreconditionError("C0 must be nonempty");
  if (!(eps > Rational(0))) throw PreconditionError("eps must be positive");
  GroupMatch res;
  // Recorded rather than enforced: adjacent translates can make C' Følner when C0 is not.
  res.c0_report = is_folner(C0, F, eps);
  res.lambda = lambda_for(eps);
  auto hit = scan_stream(H_act, D_seq, eps, E, res.lambda, C0.size(), options.max_stream);
  res.n = hit.n;
  res.d_n = std::move(hit.D);
  finish_match(res, H_act, C0.size(), eps, E);

  ElementSet used;
  const std::size_t limit = G.order() ? std::min(*G.order(), options.translate_cutoff) : options.translate_cutoff;
  for (std::size_t i = 0; i < limit && res.translates.size() < res.d; ++i) {
    Element h = G.element_at(i);
    std::vector<Element> shifted;
    bool clash = false;
    for (const auto& c : C0) {
      shifted.push_back(multiply(c, h));
      if (used.count(shifted.back())) {
        clash = true;
        break;
      }
    }
    if (clash) continue;
    used.insert(shifted.begin(), shifted.end());
    res.translates.push_back(std::move(h));
  }
  if (res.translates.size() < res.d) {
    throw SearchExhausted("found only " + std::to_string(res.translates.size()) + " of " + std::to_string(res.d) +
                          " disjoint translates of C0 within " + std::to_string(limit) + " candidates");
  }
  res.c_prime.assign(used.begin(), used.end());
  std::sort(res.c_prime.begin(), res.c_prime.end());
  res.c_report = is_folner(res.c_prime, F, eps);
  return res;
}

ActionMatch match_for_actions(const ActionSpec& X, const FolnerSet& C0, const ActionSpec& Y,
                              const FolnerStream& D_seq, Rational eps, std::span<const Element> F,
                              std::span<const Element> E, const MatchOptions& options, std::size_t first_copy) {
  if (C0.empty()) throw PreconditionError("C0 must be nonempty");
  if (!(eps > Rational(0))) throw PreconditionError("eps must be positive");
  auto c0_report = is_folner(X, C0, F, eps);
  if (!c0_report.verdict) throw PreconditionError("C0 is not (" + to_string(eps) + ", F)-Følner");
  ActionMatch res{MatchResult{}, ActionSpec::copies(X), first_copy, {}};
  res.lambda = lambda_for(eps);
  auto hit = scan_stream(Y, D_seq, eps, E, res.lambda, C0.size(), options.max_stream);
  res.n = hit.n;
  res.d_n = std::move(hit.D);
  finish_match(res, Y, C0.size(), eps, E);
  for (std::size_t c = first_copy; c < first_copy + res.d; ++c) {
    for (auto p : C0) res.c_prime.push_back(res.copies.space().join(c, p));
  }
  res.c_prime = make_folner_set(std::move(res.c_prime));
  res.c_report = is_folner(res.copies, res.c_prime, F, eps);
  return res;
}

Disjointifier::Disjointifier(GroupSpec G, FiniteSubgroup A, std::size_t cutoff)
    : G_(std::move(G)), A_(std::move(A)), cutoff_(cutoff) {
  if (!(A_.ambient() == G_)) throw GroupError("disjointify: A is not a subgroup of G");
}

std::vector<Element> Disjointifier::next(std::span<const Element> C, Element* translate) {
  ElementSet sat;
  for (const auto& a : A_.elements()) {
    for (const auto& c : C) sat.insert(multiply(a, c));
  }
  const std::size_t limit = G_.order() ? std::min(*G_.order(), cutoff_) : cutoff_;
  for (std::size_t i = 0; i < limit; ++i) {
    Element h = G_.element_at(i);
    bool clash = false;
    for (const auto& x : sat) {
      if (used_.count(multiply(x, h))) {
        clash = true;
        break;
      }
    }
    if (clash) continue;
    for (const auto& x : sat) used_.insert(multiply(x, h));
    std::vector<Element> out;
    out.reserve(C.size());
    for (const auto& c : C) out.push_back(multiply(c, h));
    std::sort(out.begin(), out.end());
    if (translate) *translate = h;
    return out;
  }
  throw SearchExhausted("no disjoint translate within " + std::to_string(limit) + " candidates");
}

std::vector<std::vector<Element>> disjointify(const GroupSpec& G, const FiniteSubgroup& A,
                                              const std::vector<std::vector<Element>>& C_seq, std::size_t cutoff) {
  Disjointifier dj(G, A, cutoff);
  std::vector<std::vector<Element>> out;
  out.reserve(C_seq.size());
  for (const auto& C : C_seq) out.push_back(dj.next(C));
  return out;
}

std::vector<std::vector<Element>> cayley_spheres(const GroupSpec& G, std::span<const Element> S, std::size_t k) {
  for (const auto& s : S) {
    if (!G.owns(s)) throw GroupError("Cayley generator outside the group");
  }
  std::vector<std::vector<Element>> spheres{{G.identity()}};
  ElementSet seen{G.identity()};
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<Element> next;
    for (const auto& x : spheres.back()) {
      for (const auto& s : S) {
        auto y = multiply(x, s);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    }
    std::sort(next.begin(), next.end());
    spheres.push_back(std::move(next));
  }
  return spheres;
}

std::vector<Element> cayley_ball(const GroupSpec& G, std::span<const Element> S, std::size_t k) {
  std::vector<Element> out;
  for (auto& sphere : cayley_spheres(G, S, k)) out.insert(out.end(), sphere.begin(), sphere.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t edge_boundary(std::span<const Element> S, std::span<const Element> C) {
  ElementSet in(C.begin(), C.end());
  std::size_t count = 0;
  for (const auto& x : C) {
    for (const auto& s : S) count += in.count(multiply(x, s)) ? 0 : 1;
  }
  return count;
}

std::vector<PrescribedTerm> prescribed_size_folner(const GroupSpec& G, std::span<const Element> S,
                                                   std::span<const std::size_t> a_seq) {
  for (std::size_t i = 0; i < a_seq.size(); ++i) {
    if (a_seq[i] == 0) throw PreconditionError("prescribed sizes must be positive");
    if (i > 0 && a_seq[i] <= a_seq[i - 1]) throw PreconditionError("prescribed sizes must be strictly ascending");
  }
  if (a_seq.empty()) return {};
  if (G.order() && a_seq.back() > *G.order()) throw PreconditionError("prescribed size exceeds the group order");

  // spheres and cumulative ball sizes, grown until the ball outgrows the largest request
  std::vector<std::vector<Element>> spheres{{G.identity()}};
  std::vector<std::size_t> ball_sizes{1};
  ElementSet seen{G.identity()};
  auto grow = [&] {
    std::vector<Element> next;
    for (const auto& x : spheres.back()) {
      for (const auto& s : S) {
        auto y = multiply(x, s);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    }
    std::sort(next.begin(), next.end());
    ball_sizes.push_back(ball_sizes.back() + next.size());
    spheres.push_back(std::move(next));
  };
  while (ball_sizes.back() <= a_seq.back() && !spheres.back().empty()) grow();
  if (ball_sizes.back() < a_seq.back()) throw PreconditionError("S does not generate enough of the group");

  std::map<std::size_t, std::size_t> ball_boundary;
  const auto s_count = static_cast<std::int64_t>(S.size());
  std::vector<PrescribedTerm> out;
  for (std::size_t i = 0; i < a_seq.size(); ++i) {
    PrescribedTerm t;
    t.n = i + 1;
    t.a = a_seq[i];
    while (t.k + 1 < ball_sizes.size() && ball_sizes[t.k + 1] <= t.a) ++t.k;
    t.ball_size = ball_sizes[t.k];
    for (std::size_t r = 0; r <= t.k; ++r) t.F.insert(t.F.end(), spheres[r].begin(), spheres[r].end());
    if (!ball_boundary.count(t.k)) ball_boundary[t.k] = edge_boundary(S, t.F);
    t.ball_boundary = ball_boundary[t.k];
    const std::size_t extra = t.a - t.ball_size;
    if (extra > 0) t.K.assign(spheres[t.k + 1].begin(), spheres[t.k + 1].begin() + static_cast<std::ptrdiff_t>(extra));
    t.F.insert(t.F.end(), t.K.begin(), t.K.end());
    std::sort(t.F.begin(), t.F.end());
    t.boundary = edge_boundary(S, t.F);
    t.ratio = Rational(static_cast<std::int64_t>(t.boundary), static_cast<std::int64_t>(t.a));
    t.bound = Rational((1 + s_count) * static_cast<std::int64_t>(t.ball_boundary),
                       static_cast<std::int64_t>(t.ball_size));
    t.holds = t.ratio <= t.bound;
    out.push_back(std::move(t));
  }
  return out;
}

std::string prescribed_csv(std::span<const PrescribedTerm> terms) {
  std::string out = "n,size,boundary,ratio\n";
  for (const auto& t : terms) {
    out += std::to_string(t.n) + "," + std::to_string(t.a) + "," + std::to_string(t.boundary) + "," +
           to_string(t.ratio) + "\n";
  }
  return out;
}

namespace detail {

struct PairCache {
  PairCache(AprimeWitness w, AprimeStreamOptions o)
      : witness(std::move(w)),
        options(o),
        y_blocks(witness.y_base(), witness.spec().A(Side::H)),
        disjoint(witness.spec().G(), witness.spec().A(Side::G), o.translate_cutoff) {}

  AprimeWitness witness;
  AprimeStreamOptions options;
  ABlockSpace y_blocks;  // A acting on Y
  Disjointifier disjoint;
  std::mutex mu;
  std::deque<AprimePair> pairs;
  std::size_t next_copy = 0;

  AprimePair build(std::size_t m);
};

AprimePair PairCache::build(std::size_t m) {
  const auto& spec = witness.spec();
  const auto& G = spec.G();
  const auto& H = spec.H();
  const auto& AG = spec.A(Side::G);
  const auto& Y = witness.y_base();
  AprimePair p;
  p.m = m;
  p.eps = Rational(1, static_cast<std::int64_t>(m + 1));

  // Y side: an A-saturated Følner set of Y at eps
  FolnerSet S0;
  if (auto n = Y.space().size()) {
    for (PointId y = 0; y < *n; ++y) S0.push_back(y);
  } else {
    bool found = false;
    for (std::size_t k = 0; k <= options.max_radius && !found; ++k) {
      std::vector<PointId> sat;
      for (auto y : orbit(Y, 0, k)) {
        auto b = y_blocks.block_of(y);
        sat.insert(sat.end(), b.begin(), b.end());
      }
      S0 = make_folner_set(std::move(sat));
      if (is_folner(Y, S0, H.symmetric_generators(), p.eps).verdict) {
        p.y_radius = k;
        found = true;
      }
    }
    if (!found) throw SearchExhausted("no Følner orbit ball in Y for eps = " + to_string(p.eps));
  }

  // X side: first A-saturated ball that is (eps/4)-Følner and larger than lambda |S0|
  const Rational lambda = lambda_for(p.eps);
  const Rational need = lambda * Rational(static_cast<std::int64_t>(S0.size()));
  std::vector<Element> E;
  bool found = false;
  for (std::size_t n = 0; n <= options.max_radius && !found; ++n) {
    ElementSet sat;
    for (const auto& b : cayley_ball(G, G.symmetric_generators(), n)) {
      for (const auto& a : AG.elements()) sat.insert(multiply(a, b));
    }
    E.assign(sat.begin(), sat.end());
    std::sort(E.begin(), E.end());
    if (Rational(static_cast<std::int64_t>(E.size())) > need &&
        is_folner(E, G.symmetric_generators(), p.eps / Rational(4)).verdict) {
      p.radius = n;
      found = true;
    }
  }
  if (!found) throw SearchExhausted("no Følner ball in G for eps = " + to_string(p.eps));
  p.d = E.size() / S0.size();
  p.r = E.size() % S0.size();
  if (p.r % AG.size() != 0) throw Error("A-saturated sets with a remainder that is not a union of blocks");

  auto T = disjoint.next(E, &p.translate);
  std::map<std::size_t, std::vector<PointId>> by_block;
  const auto& xb = witness.x_blocks();
  for (const auto& t : T) {
    PointId x = G.index_of(t);
    by_block[xb.block_index(x)].push_back(x);
  }
  std::size_t drop = p.r / AG.size();
  while (drop-- > 0) by_block.erase(std::prev(by_block.end()));
  for (auto& [k, pts] : by_block) p.x_set.insert(p.x_set.end(), pts.begin(), pts.end());
  p.x_set = make_folner_set(std::move(p.x_set));

  p.first_copy = next_copy;
  for (std::size_t c = next_copy; c < next_copy + p.d; ++c) {
    for (auto y : S0) p.y_set.push_back(witness.copy_point(c, y));
  }
  next_copy += p.d;
  p.y_set = make_folner_set(std::move(p.y_set));

  const auto tn = static_cast<std::int64_t>(T.size());
  p.size_ratio = Rational(tn, static_cast<std::int64_t>(p.x_set.size()));
  p.deletion_ratio = Rational(static_cast<std::int64_t>(p.r), tn);
  return p;
}

}  // namespace detail

AprimeFolnerStream::AprimeFolnerStream(AprimeWitness witness, AprimeStreamOptions options)
    : cache_(std::make_shared<detail::PairCache>(std::move(witness), options)) {}

const AprimeWitness& AprimeFolnerStream::witness() const noexcept { return cache_->witness; }

const AprimePair& AprimeFolnerStream::pair(std::size_t m) const {
  if (m == 0) throw PreconditionError("Følner pairs are numbered from 1");
  std::lock_guard lock(cache_->mu);
  while (cache_->pairs.size() < m) cache_->pairs.push_back(cache_->build(cache_->pairs.size() + 1));
  return cache_->pairs[m - 1];
}

bool AprimeReport::condition_ii() const {
  return std::all_of(supports.begin(), supports.end(), [](const SuppCheck& s) { return s.pass; });
}

bool AprimeReport::condition_iii() const {
  return !pairs.empty() && std::all_of(pairs.begin(), pairs.end(), [](const PairCheck& p) { return p.pass; });
}

namespace {

Rational worst_ratio(const ActionSpec& act, const FolnerSet& C, std::span<const Element> gens) {
  Rational worst(0);
  for (const auto& g : gens) worst = std::max(worst, ratio(act, C, g));
  return worst;
}

}  // namespace

AprimeReport check_aprime(const AprimeFolnerStream& stream, const AprimeOptions& options) {
  const auto& w = stream.witness();
  const auto& spec = w.spec();
  AprimeReport rep;
  rep.x_prefix = w.x_blocks().saturate(options.prefix);
  rep.y_prefix = w.y_blocks().saturate(options.prefix);

  rep.transitivity = is_transitive(w.x_action(), rep.x_prefix, rep.x_prefix);

  rep.supp_threshold = options.supp_threshold ? options.supp_threshold : options.prefix / 4;
  for (Side side : {Side::G, Side::H}) {
    const auto& K = spec.group(side);
    const auto& A = spec.A(side);
    const auto& act = side == Side::G ? w.x_action() : w.y_action();
    const std::size_t prefix = side == Side::G ? rep.x_prefix : rep.y_prefix;
    std::size_t taken = 0;
    const std::size_t limit = K.order() ? *K.order() : options.supp_samples + A.size();
    for (std::size_t i = 0; i < limit && taken < options.supp_samples; ++i) {
      Element g = K.element_at(i);
      if (A.contains(g)) continue;
      ++taken;
      SuppCheck s;
      s.side = side;
      s.count = supp_A(act, A, g, prefix).size();
      s.pass = s.count >= rep.supp_threshold;
      s.g = std::move(g);
      rep.supports.push_back(std::move(s));
    }
  }

  std::unordered_set<PointId> x_used, y_used;
  for (std::size_t m = 1; m <= options.pairs; ++m) {
    const auto& p = stream.pair(m);
    PairCheck c;
    c.m = m;
    c.eps = p.eps;
    c.size = p.x_set.size();
    c.sizes_equal = p.x_set.size() == p.y_set.size();
    c.x_ratio = worst_ratio(w.x_action(), p.x_set, spec.G().symmetric_generators());
    c.y_ratio = worst_ratio(w.y_action(), p.y_set, spec.H().symmetric_generators());
    c.disjoint = true;
    auto absorb = [&](const ABlockSpace& blocks, const FolnerSet& S, std::unordered_set<PointId>& used) {
      std::vector<PointId> sat;
      for (auto x : S) {
        auto b = blocks.block_of(x);
        sat.insert(sat.end(), b.begin(), b.end());
      }
      for (auto x : sat) {
        if (used.count(x)) c.disjoint = false;
      }
      used.insert(sat.begin(), sat.end());
    };
    absorb(w.x_blocks(), p.x_set, x_used);
    absorb(w.y_blocks(), p.y_set, y_used);
    c.pass = c.sizes_equal && c.x_ratio < p.eps && c.y_ratio < p.eps && c.disjoint;
    rep.pairs.push_back(std::move(c));
  }

  rep.x_free = is_free(w.x_action(), spec.A(Side::G), rep.x_prefix);
  rep.y_free = is_free(w.y_action(), spec.A(Side::H), rep.y_prefix);
  return rep;
}

}  // namespace amalgact
