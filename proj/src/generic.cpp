#include "amalgact/generic.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "amalgact/error.hpp"

namespace amalgact {

ActionPair ActionPair::from(const AprimeWitness& w) {
  return ActionPair{w.spec(), w.x_action(), w.x_h_action(), w.x_blocks()};
}

PartialPermutation::PartialPermutation(ABlockSpace blocks) : blocks_(std::move(blocks)) {}

PartialPermutation PartialPermutation::from_tables(ABlockSpace blocks, std::map<PointId, PointId> forward,
                                                   std::map<PointId, PointId> backward) {
  PartialPermutation s(std::move(blocks));
  s.forward_ = std::move(forward);
  s.backward_ = std::move(backward);
  return s;
}

std::optional<PointId> PartialPermutation::forward(PointId x) const {
  auto it = forward_.find(blocks_.base(x));
  if (it == forward_.end()) return std::nullopt;
  return blocks_.action().act(blocks_.offset(x), it->second);
}

std::optional<PointId> PartialPermutation::backward(PointId y) const {
  auto it = backward_.find(blocks_.base(y));
  if (it == backward_.end()) return std::nullopt;
  return blocks_.action().act(blocks_.offset(y), it->second);
}

void PartialPermutation::assign(PointId x, PointId y) {
  const PointId bx = blocks_.base(x), by = blocks_.base(y);
  if (forward_.count(bx)) {
    throw PreconditionError("block " + std::to_string(blocks_.block_index(bx)) + " is already in the domain");
  }
  if (backward_.count(by)) {
    throw PreconditionError("block " + std::to_string(blocks_.block_index(by)) + " is already in the range");
  }
  const auto& act = blocks_.action();
  const Element ax = blocks_.offset(x), ay = blocks_.offset(y);
  // x = ax.bx and y = ay.by, so sigma(bx) = ax^-1 ay.by and sigma^-1(by) = ay^-1 ax.bx
  forward_[bx] = act.act(multiply(inverse(ax), ay), by);
  backward_[by] = act.act(multiply(inverse(ay), ax), bx);
}

std::uint64_t digest(const PartialPermutation& sigma) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [b, y] : sigma.forward_table()) {
    feed(b);
    feed(y);
  }
  return h;
}

AuditResult audit(const PartialPermutation& sigma) {
  const auto& blocks = sigma.blocks();
  const auto& act = blocks.action();
  const auto& A = blocks.A();
  auto fail = [&](PointId base, const std::string& what) {
    return AuditResult{false, "block " + std::to_string(blocks.block_index(base)) + ": " + what, base};
  };
  std::unordered_set<PointId> image_blocks;
  for (const auto& [b, y] : sigma.forward_table()) {
    if (blocks.base(b) != b) return fail(blocks.base(b), "forward key is not a block base");
    if (!image_blocks.insert(blocks.base(y)).second) return fail(b, "image block is hit twice");
    for (const auto& a : A.elements()) {
      const PointId x = act.act(a, b);
      auto fx = sigma.forward(x);
      if (!fx || *fx != act.act(a, y)) return fail(b, "sigma does not commute with A");
      auto back = sigma.backward(*fx);
      if (!back || *back != x) return fail(b, "backward table does not invert forward");
    }
  }
  if (sigma.backward_table().size() != sigma.forward_table().size()) {
    for (const auto& [by, x] : sigma.backward_table()) {
      if (!image_blocks.count(by)) return fail(by, "backward entry without a forward preimage");
    }
    return AuditResult{false, "forward and backward tables differ in size", std::nullopt};
  }
  for (const auto& [by, x] : sigma.backward_table()) {
    auto fx = sigma.forward(x);
    if (!fx || *fx != by) return fail(by, "forward does not invert backward");
  }
  return {};
}

std::optional<std::vector<PointId>> evaluate_trace(const PartialPermutation& sigma, const ActionPair& P,
                                                   const AmalgamWord& w, PointId x) {
  std::vector<PointId> trace{x};
  const auto& syl = w.syllables();
  for (auto it = syl.rbegin(); it != syl.rend(); ++it) {
    if (it->side == Side::G) {
      trace.push_back(P.g_act.act(it->element, trace.back()));
      continue;
    }
    auto s = sigma.forward(trace.back());
    if (!s) return std::nullopt;
    trace.push_back(*s);
    trace.push_back(P.h_act.act(it->element, *s));
    auto u = sigma.backward(trace.back());
    if (!u) return std::nullopt;
    trace.push_back(*u);
  }
  return trace;
}

std::optional<PointId> evaluate_word(const PartialPermutation& sigma, const ActionPair& P, const AmalgamWord& w,
                                     PointId x) {
  auto trace = evaluate_trace(sigma, P, w, x);
  if (!trace) return std::nullopt;
  return P.g_act.act(w.head(), trace->back());
}

namespace {

class FreshPicker {
 public:
  FreshPicker(const PartialPermutation& sigma, const ActionPair& P, std::size_t cutoff)
      : blocks_(P.blocks), cutoff_(cutoff) {
    for (const auto& [b, y] : sigma.forward_table()) {
      used_.insert(blocks_.block_index(b));
      used_.insert(blocks_.block_index(y));
    }
  }

  std::size_t block(PointId p) const { return blocks_.block_index(p); }
  bool fresh(PointId p) const { return !used_.count(block(p)); }
  void take(PointId p) { used_.insert(block(p)); }

  // x in supp_A(s): no a in A sends s.a.x back into the block of x
  bool in_supp(const ActionSpec& act, const Element& s, PointId x) const {
    const auto bx = block(x);
    for (const auto& a : blocks_.A().elements()) {
      if (block(act.act(s, blocks_.action().act(a, x))) == bx) return false;
    }
    return true;
  }

  template <class Pred>
  PointId pick(Pred pred, const std::string& what) const {
    for (std::size_t k = 0; k < cutoff_; ++k) {
      if (used_.count(k)) continue;
      PointId b = blocks_.block_base(k);
      if (pred(b)) return b;
    }
    throw SearchExhausted("no fresh block " + what + " among the first " + std::to_string(cutoff_) + " blocks");
  }

  // fresh x in supp_A(s) whose image s.x also lies in a fresh block
  PointId pick_moved(const ActionSpec& act, const Element& s, const std::string& name) const {
    return pick([&](PointId x) { return in_supp(act, s, x) && fresh(act.act(s, x)); },
                "in supp_A(" + name + ") with a fresh image");
  }

  PointId pick_any() const {
    return pick([](PointId) { return true; }, "");
  }

 private:
  const ABlockSpace& blocks_;
  std::size_t cutoff_;
  std::unordered_set<std::size_t> used_;
};

}  // namespace

WordWitness extend_avoid_word(PartialPermutation& sigma, const ActionPair& P, const AmalgamWord& w,
                              const FreshOptions& options) {
  if (w.is_identity()) throw PreconditionError("the identity word moves no point");
  FreshPicker fresh(sigma, P, options.block_cutoff);
  const auto& syl = w.syllables();
  const auto& spec = P.spec;
  auto label = [&](const Syllable& s) { return std::string(1, side_letter(s.side)) + ":" + spec.group(s.side).name(s.element); };

  WordWitness out{w, 0, {}, 0};
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(syl.size()) - 1;
  PointId cur;
  if (i >= 0 && syl[i].side == Side::G) {
    const auto& g = syl[i].element;
    out.x0 = fresh.pick_moved(P.g_act, g, label(syl[i]));
    fresh.take(out.x0);
    cur = P.g_act.act(g, out.x0);
    fresh.take(cur);
    out.trace = {out.x0, cur};
    --i;
  } else {
    out.x0 = fresh.pick_any();
    fresh.take(out.x0);
    cur = out.x0;
    out.trace = {out.x0};
  }
  while (i >= 0) {
    const auto& h = syl[i].element;
    const PointId x_new = fresh.pick_moved(P.h_act, h, label(syl[i]));
    sigma.assign(cur, x_new);
    fresh.take(x_new);
    const PointId q = P.h_act.act(h, x_new);
    fresh.take(q);
    out.trace.push_back(x_new);
    out.trace.push_back(q);
    --i;
    PointId pre;
    if (i >= 0) {
      const auto& g = syl[i].element;
      pre = fresh.pick_moved(P.g_act, g, label(syl[i]));
      sigma.assign(pre, q);
      fresh.take(pre);
      cur = P.g_act.act(g, pre);
      fresh.take(cur);
      out.trace.push_back(pre);
      out.trace.push_back(cur);
      --i;
    } else {
      pre = fresh.pick_any();
      sigma.assign(pre, q);
      fresh.take(pre);
      cur = pre;
      out.trace.push_back(pre);
    }
  }
  out.endpoint = P.g_act.act(w.head(), cur);

  auto replay = evaluate_trace(sigma, P, w, out.x0);
  if (!replay || *replay != out.trace) throw Error("word witness does not replay: " + to_text(w));
  if (out.endpoint == out.x0) throw Error("word witness fixes its start point: " + to_text(w));
  return out;
}

namespace {

struct BlockPattern {
  PointId base;
  std::size_t index;
  std::vector<std::size_t> key;  // least right translate of the pattern, as positions in A
  Element shift;                 // c with pattern * c == key
};

std::vector<BlockPattern> patterns(const ABlockSpace& blocks, const FolnerSet& S) {
  const auto& A = blocks.A();
  std::map<PointId, std::vector<Element>> members;
  for (auto p : S) members[blocks.base(p)].push_back(blocks.offset(p));
  std::vector<BlockPattern> out;
  for (auto& [base, P] : members) {
    BlockPattern bp{base, blocks.block_index(base), {}, A.elements().front()};
    bool first = true;
    for (const auto& c : A.elements()) {
      std::vector<std::size_t> key;
      for (const auto& a : P) key.push_back(A.position(multiply(a, c)));
      std::sort(key.begin(), key.end());
      if (first || key < bp.key) {
        bp.key = std::move(key);
        bp.shift = c;
        first = false;
      }
    }
    out.push_back(std::move(bp));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  return out;
}

FolnerSet image_of(const PartialPermutation& sigma, const FolnerSet& C) {
  std::vector<PointId> out;
  for (auto c : C) {
    auto y = sigma.forward(c);
    if (!y) return {};
    out.push_back(*y);
  }
  return make_folner_set(std::move(out));
}

}  // namespace

void extend_match_folner(PartialPermutation& sigma, const FolnerSet& C, const FolnerSet& D) {
  if (C.size() != D.size()) {
    throw PreconditionError("|C| = " + std::to_string(C.size()) + " differs from |D| = " + std::to_string(D.size()));
  }
  const auto& blocks = sigma.blocks();
  auto pc = patterns(blocks, C);
  auto pd = patterns(blocks, D);
  for (const auto& b : pc) {
    if (sigma.in_domain(b.base)) throw PreconditionError("block " + std::to_string(b.index) + " of C is already in the domain");
  }
  for (const auto& b : pd) {
    if (sigma.in_range(b.base)) throw PreconditionError("block " + std::to_string(b.index) + " of D is already in the range");
  }
  std::map<std::vector<std::size_t>, std::deque<const BlockPattern*>> by_key;
  for (const auto& b : pd) by_key[b.key].push_back(&b);
  for (const auto& b : pc) {
    auto it = by_key.find(b.key);
    if (it == by_key.end() || it->second.empty()) {
      throw PreconditionError("block " + std::to_string(b.index) + " of C has an A-pattern that D lacks");
    }
    const BlockPattern* t = it->second.front();
    it->second.pop_front();
    const Element a0 = multiply(b.shift, inverse(t->shift));
    sigma.assign(b.base, blocks.action().act(a0, t->base));
  }
  if (image_of(sigma, C) != D) throw Error("matched image differs from D");
}

Rational conjugated_ratio(const PartialPermutation& sigma, const ActionPair& P, const FolnerSet& C,
                          const Element& h) {
  if (C.empty()) throw PreconditionError("Følner ratio of an empty set");
  std::unordered_set<PointId> in(C.begin(), C.end());
  std::int64_t out = 0;
  for (auto c : C) {
    auto s = sigma.forward(c);
    std::optional<PointId> u;
    if (s) u = sigma.backward(P.h_act.act(h, *s));
    if (!u || !in.count(*u)) ++out;
  }
  return Rational(2 * out, static_cast<std::int64_t>(C.size()));
}

namespace {

std::vector<RatioEntry> ratio_entries(const PartialPermutation& sigma, const AprimeWitness& w, const ActionPair& P,
                                      const FolnerSet& C, const FolnerSet& D_y) {
  std::vector<RatioEntry> out;
  for (const auto& g : w.spec().G().symmetric_generators()) {
    out.push_back(RatioEntry{Side::G, g, ratio(P.g_act, C, g), Rational(0)});
  }
  for (const auto& h : w.spec().H().symmetric_generators()) {
    out.push_back(RatioEntry{Side::H, h, conjugated_ratio(sigma, P, C, h), ratio(w.y_action(), D_y, h)});
  }
  return out;
}

FolnerSet to_x_set(const AprimeWitness& w, const FolnerSet& D_y) {
  std::vector<PointId> out;
  out.reserve(D_y.size());
  for (auto y : D_y) out.push_back(w.to_x(y));
  return make_folner_set(std::move(out));
}

std::vector<AmalgamWord> nontrivial_words(const AmalgamSpec& spec, std::size_t L,
                                          const std::optional<std::size_t>& radius) {
  auto all = enumerate_words(spec, L, WordEnumerationOptions{radius});
  std::vector<AmalgamWord> out;
  for (auto& w : all) {
    if (!w.is_identity()) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

GenericResult build_generic(const AprimeFolnerStream& stream, std::size_t L, Rational eps,
                            const GenericOptions& options) {
  if (!(eps > Rational(0))) throw PreconditionError("eps must be positive");
  const auto& w = stream.witness();
  const auto P = ActionPair::from(w);
  GenericResult res{PartialPermutation(P.blocks), Certificate{}};
  auto& sigma = res.sigma;
  auto& cert = res.certificate;
  cert.L = L;
  cert.word_radius = options.word_radius;
  cert.eps = eps;
  cert.requested_matches = options.matches;

  for (const auto& word : nontrivial_words(w.spec(), L, options.word_radius)) {
    cert.words.push_back(extend_avoid_word(sigma, P, word, options.fresh));
  }

  for (std::size_t m = 1; m <= options.max_m && cert.matches.size() < options.matches; ++m) {
    const auto& pair = stream.pair(m);
    const FolnerSet& C = pair.x_set;
    const FolnerSet D = to_x_set(w, pair.y_set);
    bool ok = std::none_of(C.begin(), C.end(), [&](PointId x) { return sigma.in_domain(x); }) &&
              std::none_of(D.begin(), D.end(), [&](PointId y) { return sigma.in_range(y); });
    for (const auto& g : w.spec().G().symmetric_generators()) ok = ok && ratio(P.g_act, C, g) < eps;
    for (const auto& h : w.spec().H().symmetric_generators()) ok = ok && ratio(w.y_action(), pair.y_set, h) < eps;
    if (!ok) continue;
    extend_match_folner(sigma, C, D);
    cert.matches.push_back(MatchRecord{m, C, D, pair.y_set, ratio_entries(sigma, w, P, C, pair.y_set)});
  }
  if (cert.matches.size() < options.matches) {
    throw SearchExhausted("only " + std::to_string(cert.matches.size()) + " of " + std::to_string(options.matches) +
                          " Følner pairs were admissible up to index " + std::to_string(options.max_m));
  }
  cert.digest = digest(sigma);
  return res;
}

Verdict verify_certificate(const PartialPermutation& sigma, const Certificate& cert, const AprimeWitness& witness) {
  auto fail = [](std::string why) { return Verdict{false, std::move(why)}; };
  const auto P = ActionPair::from(witness);
  const auto& blocks = sigma.blocks();

  if (auto a = audit(sigma); !a.ok) return fail("equivariance audit: " + a.failure);
  if (digest(sigma) != cert.digest) return fail("sigma digest differs from the certificate");

  auto expected = nontrivial_words(witness.spec(), cert.L, cert.word_radius);
  if (expected.size() != cert.words.size()) {
    return fail("certificate lists " + std::to_string(cert.words.size()) + " words, expected " +
                std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& ww = cert.words[i];
    if (!(ww.word == expected[i])) return fail("word " + std::to_string(i) + " is not " + to_text(expected[i]));
    auto trace = evaluate_trace(sigma, P, ww.word, ww.x0);
    if (!trace) return fail("word " + to_text(ww.word) + " is undefined at its witness");
    if (*trace != ww.trace) return fail("word " + to_text(ww.word) + " does not replay its trace");
    const PointId end = P.g_act.act(ww.word.head(), trace->back());
    if (end != ww.endpoint) return fail("word " + to_text(ww.word) + " ends at a different point");
    if (end == ww.x0) return fail("word " + to_text(ww.word) + " fixes its witness");
    std::unordered_set<std::size_t> seen;
    for (auto p : *trace) {
      if (!seen.insert(blocks.block_index(p)).second) {
        return fail("word " + to_text(ww.word) + " revisits a block along its trace");
      }
    }
  }

  if (cert.matches.size() < cert.requested_matches) return fail("fewer Følner matches than requested");
  for (const auto& mr : cert.matches) {
    const std::string tag = "match m=" + std::to_string(mr.m) + ": ";
    if (image_of(sigma, mr.C) != mr.D) return fail(tag + "sigma(C) differs from D");
    if (to_x_set(witness, mr.D_y) != mr.D) return fail(tag + "D is not the image of the Y' set");
    auto fresh = ratio_entries(sigma, witness, P, mr.C, mr.D_y);
    if (fresh.size() != mr.ratios.size()) return fail(tag + "ratio list has the wrong length");
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      const auto& r = mr.ratios[i];
      const auto& f = fresh[i];
      const std::string gen = witness.spec().group(f.side).name(f.generator);
      if (!(r.generator == f.generator) || r.ratio != f.ratio || r.raw_ratio != f.raw_ratio) {
        return fail(tag + "recorded ratio for " + gen + " does not recompute");
      }
      if (!(f.ratio < cert.eps)) return fail(tag + "ratio for " + gen + " is not below eps");
      if (f.side == Side::H && f.ratio != f.raw_ratio) return fail(tag + "conjugated ratio for " + gen + " differs from Y'");
    }
  }
  return {};
}

}  // namespace amalgact
