// Acceptance run: one PASS/FAIL line per criterion, each with its runtime against a pinned limit.
// Every check uses exact rationals; the oracles here are computed independently of the library
// code they judge wherever that is possible at this scale.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "amalgact/actions.hpp"
#include "amalgact/amalgam.hpp"
#include "amalgact/bass_serre.hpp"
#include "amalgact/folner.hpp"
#include "amalgact/generic.hpp"
#include "fixtures.hpp"
#include "property.hpp"
#include "tree_oracle.hpp"

using namespace amalgact;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<void(Outcome&)> body;
};

std::string str(const Rational& r) { return to_string(r); }

using Pt = std::pair<std::int64_t, std::int64_t>;

std::size_t pair_boundary(const std::set<Pt>& C) {
  const Pt steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::size_t n = 0;
  for (auto [x, y] : C) {
    for (auto [dx, dy] : steps) n += C.count({x + dx, y + dy}) == 0;
  }
  return n;
}

std::set<Pt> diamond(std::int64_t k) {
  std::set<Pt> out;
  for (auto x = -k; x <= k; ++x) {
    for (auto y = -k; y <= k; ++y) {
      if (std::abs(x) + std::abs(y) <= k) out.insert({x, y});
    }
  }
  return out;
}

Rational q(std::size_t a, std::size_t b) { return Rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)); }

// ---- 1: equal-cardinality matching, Z against Z^2 ----

void matching(Outcome& out, Rational eps) {
  auto Z = GroupSpec::free_abelian(1);
  auto Z2 = GroupSpec::free_abelian(2);
  auto H = ActionSpec::regular(Z2);
  std::vector<Element> C0;
  for (std::int64_t i = 0; i < 10; ++i) C0.push_back(Z.vector_element({i}));
  FolnerStream boxes = [&](std::size_t n) -> std::optional<FolnerSet> {
    std::vector<PointId> pts;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        pts.push_back(H.space().point_of(Z2.vector_element({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)})));
      }
    }
    return make_folner_set(std::move(pts));
  };
  const auto& F = Z.symmetric_generators();
  const auto& E = Z2.symmetric_generators();
  auto m = match_cardinalities(Z, C0, H, boxes, eps, F, E);

  // the box [0,n)^2 has ratio 2/n for each axis generator; n is the first index past both thresholds
  const Rational lambda = std::max(Rational(8) / eps, Rational(2));
  std::size_t n = 1;
  while (!(q(n * n, 1) > lambda * 10 && q(2, n) < eps / 4)) ++n;
  const std::string tag = "eps " + str(eps) + ": ";
  out.require(m.n == n && m.d == n * n / 10 && m.r == n * n % 10,
              tag + "n, d, r = " + std::to_string(m.n) + ", " + std::to_string(m.d) + ", " + std::to_string(m.r));
  out.require(m.c_prime.size() == m.d_prime.size(), tag + "|C'| = |D'|");

  // recompute both Følner verdicts from scratch at eps
  auto c = is_folner(m.c_prime, F, eps);
  auto d = is_folner(H, m.d_prime, E, eps);
  out.require(c.verdict, tag + "C' is (eps, F)-Følner");
  out.require(d.verdict, tag + "D' is (eps, E)-Følner");
  const Rational size_ratio = q(m.d_n.size(), m.d_prime.size());
  std::vector<PointId> diff;
  std::set_symmetric_difference(m.d_n.begin(), m.d_n.end(), m.d_prime.begin(), m.d_prime.end(), std::back_inserter(diff));
  const Rational deletion = q(diff.size(), m.d_n.size());
  out.require(size_ratio < 2, tag + "|D_n|/|D'| < 2");
  out.require(deletion < eps / 8, tag + "deletion ratio < eps/8");
  out.note(tag + "n=" + std::to_string(m.n) + " d=" + std::to_string(m.d) + " r=" + std::to_string(m.r) +
           " |D_n|/|D'|=" + str(size_ratio) + " deletion=" + str(deletion));
}

// ---- 2: prescribed sizes on Z^2 ----

void prescribed(Outcome& out) {
  auto Z2 = GroupSpec::free_abelian(2);
  const auto& S = Z2.symmetric_generators();
  const std::vector<std::size_t> sizes{1, 2, 5, 7, 13, 18, 25, 30, 41, 50, 61, 70, 85, 100, 113, 130, 145, 160, 181, 200};
  out.require(std::is_sorted(sizes.begin(), sizes.end()) && std::adjacent_find(sizes.begin(), sizes.end()) == sizes.end(),
              "sizes strictly ascending");
  auto terms = prescribed_size_folner(Z2, S, sizes);
  out.require(terms.size() == sizes.size(), "one term per size");
  std::size_t non_ball = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    const std::string tag = "a_" + std::to_string(i + 1) + " = " + std::to_string(sizes[i]) + ": ";
    out.require(t.F.size() == sizes[i], tag + "|F_n| = a_n");
    std::set<Pt> F;
    for (const auto& g : t.F) F.insert({g.coords()[0], g.coords()[1]});
    out.require(F.size() == sizes[i], tag + "F_n has distinct points");
    auto ball = diamond(static_cast<std::int64_t>(t.k));
    out.require(ball.size() <= sizes[i] && diamond(static_cast<std::int64_t>(t.k) + 1).size() > sizes[i], tag + "k_n");
    out.require(std::includes(F.begin(), F.end(), ball.begin(), ball.end()), tag + "B(k_n) inside F_n");
    non_ball += ball.size() != sizes[i];
    const Rational lhs = q(pair_boundary(F), F.size());
    const Rational rhs = Rational(1 + static_cast<std::int64_t>(S.size())) * q(pair_boundary(ball), ball.size());
    out.require(lhs <= rhs, tag + "|dF|/|F| = " + str(lhs) + " <= " + str(rhs));
    out.require(t.ratio == lhs && t.bound == rhs, tag + "reported ratio and bound");
  }
  out.require(non_ball > 0, "some sizes are not ball sizes");
  out.note(std::to_string(terms.size()) + " terms, " + std::to_string(non_ball) + " of them not ball sizes");
}

// ---- 3: generic action certificate ----

void generic(Outcome& out) {
  auto cfg = fixtures::amalgam("zxz2-sym3");
  out.require(cfg.L == 3 && cfg.eps == Rational(1, 5) && cfg.word_radius == 2u, "preset has L = 3, eps = 1/5, radius 2");
  auto w = build_aprime_witness(cfg.spec, *cfg.Y, cfg.prefix);
  AprimeFolnerStream stream(w);
  GenericOptions opts;
  opts.word_radius = cfg.word_radius;
  auto res = build_generic(stream, 3, Rational(1, 5), opts);
  const auto& cert = res.certificate;
  auto v = verify_certificate(res.sigma, cert, w);
  out.require(v.ok, "verify_certificate: " + v.failure);

  // word count: A-coset representatives of Z x Z/2 meeting the radius-2 ball are k = -2..2;
  // Sym3 over a subgroup of order 2 has 3 cosets
  const std::size_t tg = 2 * 2, th = 6 / 2 - 1, a = 2;
  std::size_t words = 1;
  for (std::size_t len = 1; len <= 3; ++len) {
    std::size_t from_g = 1, from_h = 1;
    for (std::size_t i = 0; i < len; ++i) {
      from_g *= i % 2 == 0 ? tg : th;
      from_h *= i % 2 == 0 ? th : tg;
    }
    words += from_g + from_h;
  }
  words = a * words - 1;
  out.require(cert.words.size() == words,
              "nontrivial words " + std::to_string(cert.words.size()) + " = " + std::to_string(words));

  auto P = ActionPair::from(w);
  for (const auto& ww : cert.words) {
    auto end = evaluate_word(res.sigma, P, ww.word, ww.x0);
    if (!end || *end == ww.x0) out.require(false, "word " + to_text(ww.word) + " moves x0");
  }
  out.require(cert.matches.size() == 1, "one Følner match");
  for (const auto& mr : cert.matches) {
    std::set<PointId> image;
    bool defined = true;
    for (auto x : mr.C) {
      auto y = res.sigma.forward(x);
      defined = defined && y.has_value();
      if (y) image.insert(*y);
    }
    out.require(defined && image == std::set<PointId>(mr.D.begin(), mr.D.end()), "sigma(C_m) = D_m");
    for (const auto& r : mr.ratios) out.require(r.ratio < Rational(1, 5), "generator ratio " + str(r.ratio) + " < 1/5");
  }
  auto au = audit(res.sigma);
  out.require(au.ok, "A-equivariance audit: " + au.failure);

  // mutation: every single forward entry redirected to a block outside the range
  std::vector<std::pair<PointId, PointId>> entries(res.sigma.forward_table().begin(), res.sigma.forward_table().end());
  PointId spare = 0;
  while (res.sigma.in_range(spare)) ++spare;
  spare = res.sigma.blocks().base(spare);
  const std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<std::size_t>> jobs;
  for (std::size_t t = 0; t < workers; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      std::size_t survived = 0;
      for (std::size_t i = t; i < entries.size(); i += workers) {
        auto bad = res.sigma;
        bad.overwrite_forward(entries[i].first, spare);
        survived += verify_certificate(bad, cert, w).ok;
      }
      return survived;
    }));
  }
  std::size_t survived = 0;
  for (auto& j : jobs) survived += j.get();
  out.require(survived == 0, std::to_string(survived) + " mutations survived verification");
  out.note(std::to_string(cert.words.size()) + " words, " + std::to_string(res.sigma.size()) + " blocks, " +
           std::to_string(entries.size()) + " mutations rejected");
}

// ---- 4: Bass-Serre rank of doubles ----

void bass_serre(Outcome& out) {
  const auto& lib = fixtures::library();
  struct Case {
    const char* group;
    std::vector<const char*> A;
    long betti;
  };
  for (const auto& c : {Case{"z4", {"0", "2"}, 1}, Case{"z6", {"0", "3"}, 2}, Case{"z6", {"0", "2", "4"}, 1}}) {
    const auto& G = lib.group(c.group);
    std::vector<Element> els;
    for (auto n : c.A) els.push_back(G.parse(n));
    auto d = DoubleSpec::from_epimorphism(Homomorphism::identity(G), FiniteSubgroup(G, els));
    const std::string tag = std::string(c.group) + " over " + std::to_string(els.size()) + " elements: ";
    auto g = quotient_graph(d);
    const long index = static_cast<long>(*G.order() / els.size());
    out.require(static_cast<long>(g.betti) == index - 1 && g.betti == static_cast<std::size_t>(c.betti),
                tag + "betti " + std::to_string(g.betti));
    auto t = oracle::truncated_tree_quotient(d, 3);
    out.require(t.betti() == c.betti && t.edges == static_cast<std::size_t>(index), tag + "radius-3 tree oracle");
    auto w = witness_circuit(d);
    out.require(w.psi_trivial && w.x_inv_h_in_H_minus_A && w.passed(), tag + "circuit audit");
    // recompute psi(h) and x^-1 h directly
    const auto& spec = d.base();
    out.require(psi(d, w.h) == G.identity(), tag + "psi(h) = 1");
    auto xh = amalgam_multiply(reduce(spec, std::vector<Syllable>{Syllable{Side::G, inverse(w.x)}}), w.h);
    // normal form a | H:t with a in A, so x^-1 h = phi(a) t lies in H; it must be z^-1, outside A
    bool in_h = xh.length() == 1 && xh.syllables()[0].side == Side::H;
    if (in_h) {
      const auto value = multiply(spec.phi(xh.head()), xh.syllables()[0].element);
      in_h = value == inverse(d.pi()(w.x)) && !spec.A(Side::H).contains(value);
    }
    out.require(in_h, tag + "x^-1 h lies in H outside A");
    out.note(tag + "betti " + std::to_string(g.betti));
  }
}

// ---- 5: supp_A of free regular actions ----

void supports(Outcome& out) {
  const auto& lib = fixtures::library();
  std::size_t pairs = 0, groups = 0;
  for (const auto& name : fixtures::finite_groups()) {
    const auto& G = lib.group(name);
    if (G.kind() != GroupKind::FiniteTable || *G.order() > 24) continue;
    ++groups;
    auto act = ActionSpec::regular(G);
    for (const auto& [label, A] : lib.subgroups(name)) {
      ABlockSpace B(act, A);
      std::set<std::size_t> prefixes{*G.order(), B.saturate(*G.order() / 2), B.saturate(1)};
      for (auto prefix : prefixes) {
        for (std::size_t i = 0; i < *G.order(); ++i) {
          auto g = G.element_at(i);
          auto s = supp_A(act, A, g, prefix);
          const bool ok = A.contains(g) ? s.empty() : s.size() == prefix;
          if (!ok) out.require(false, name + "/" + label + " at " + G.name(g) + " prefix " + std::to_string(prefix));
          ++pairs;
        }
      }
    }
  }
  out.note(std::to_string(groups) + " groups, " + std::to_string(pairs) + " (A, g, prefix) triples");
}

// ---- 6: invariant suites ----

std::vector<Syllable> letters(const AmalgamSpec& spec, prop::Rng& rng, std::size_t max_len) {
  std::vector<Syllable> raw;
  const auto n = rng.below(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Side s = rng.coin() ? Side::G : Side::H;
    raw.push_back({s, fixtures::random_element(spec.group(s), rng, 3)});
  }
  return raw;
}

void invariants(Outcome& out) {
  const auto& lib = fixtures::library();
  std::vector<prop::Result> results;

  for (const auto& name : lib.names()) {
    const auto& G = lib.group(name);
    results.push_back(prop::check("group laws " + name, 1000, 61, [&](prop::Rng& rng, std::string& why) {
      auto a = fixtures::random_element(G, rng), b = fixtures::random_element(G, rng), c = fixtures::random_element(G, rng);
      why = G.name(a) + " " + G.name(b) + " " + G.name(c);
      return multiply(multiply(a, b), c) == multiply(a, multiply(b, c)) && multiply(a, G.identity()) == a &&
             multiply(G.identity(), a) == a && multiply(a, inverse(a)) == G.identity() && G.parse(G.name(a)) == a;
    }));
  }

  {
    // exhaustive normal-form count on Z/4 *_{Z/2} Z/6
    auto spec = fixtures::amalgam("z4-z6").spec;
    prop::Result r{"normal-form count", 0, true, {}};
    for (std::size_t L = 0; L <= 3; ++L) {
      // nontrivial transversals: 1 element on the Z/4 side, 2 on the Z/6 side
      std::size_t total = 1;
      for (std::size_t n = 1; n <= L; ++n) {
        std::size_t g = 1, h = 1;
        for (std::size_t i = 0; i < n; ++i) {
          g *= i % 2 == 0 ? 1 : 2;
          h *= i % 2 == 0 ? 2 : 1;
        }
        total += g + h;
      }
      auto words = enumerate_words(spec, L);
      std::set<std::string> distinct;
      bool round_trip = true;
      for (const auto& w : words) {
        distinct.insert(to_text(w));
        round_trip = round_trip && reduce(spec, flatten(w)) == w;
        ++r.cases;
      }
      if (words.size() != 2 * total || distinct.size() != words.size() || !round_trip) {
        r.passed = false;
        r.counterexample = "L = " + std::to_string(L) + ": " + std::to_string(words.size()) + " words, expected " +
                           std::to_string(2 * total);
      }
    }
    results.push_back(r);
  }

  for (const char* g : {"z4", "z6", "sym3", "d4"}) {
    const auto& G = lib.group(g);
    const auto& A = lib.subgroups(g)[1].second;
    auto d = DoubleSpec::from_epimorphism(Homomorphism::identity(G), A);
    const auto& spec = d.base();
    results.push_back(prop::check(std::string("psi homomorphism ") + g, 1000, 62, [&](prop::Rng& rng, std::string& why) {
      auto u = reduce(spec, letters(spec, rng, 5));
      auto v = reduce(spec, letters(spec, rng, 5));
      why = to_text(u) + " ; " + to_text(v);
      return psi(d, amalgam_multiply(u, v)) == multiply(psi(d, u), psi(d, v));
    }));
  }

  for (const char* name : {"zz", "zxz2", "sym4", "q8"}) {
    const auto& G = lib.group(name);
    results.push_back(prop::check(std::string("ratio translation ") + name, 1000, 63, [&](prop::Rng& rng, std::string& why) {
      std::vector<Element> C;
      const auto k = 1 + rng.below(12);
      for (std::size_t i = 0; i < k; ++i) C.push_back(fixtures::random_element(G, rng, 3));
      std::sort(C.begin(), C.end());
      C.erase(std::unique(C.begin(), C.end()), C.end());
      auto h = fixtures::random_element(G, rng, 10), g = fixtures::random_element(G, rng, 3);
      std::vector<Element> Ch;
      for (const auto& c : C) Ch.push_back(multiply(c, h));
      why = G.name(g) + " " + G.name(h);
      return ratio(C, g) == ratio(Ch, g);
    }));
  }

  {
    const auto& G = lib.group("zxz2");
    const auto& A = lib.subgroups("zxz2")[1].second;
    results.push_back(prop::check("disjointify ratios", 1000, 64, [&](prop::Rng& rng, std::string& why) {
      std::vector<std::vector<Element>> seq(3);
      for (auto& C : seq) {
        const auto k = 1 + rng.below(6);
        for (std::size_t i = 0; i < k; ++i) C.push_back(fixtures::random_element(G, rng, 4));
        std::sort(C.begin(), C.end());
        C.erase(std::unique(C.begin(), C.end()), C.end());
      }
      auto outs = disjointify(G, A, seq);
      for (std::size_t t = 0; t < seq.size(); ++t) {
        for (const auto& g : G.symmetric_generators()) {
          if (ratio(seq[t], g) != ratio(outs[t], g)) {
            why = "term " + std::to_string(t) + " generator " + G.name(g);
            return false;
          }
        }
      }
      return true;
    }));
  }

  std::size_t cases = 0;
  for (const auto& r : results) {
    cases += r.cases;
    out.require(r.passed, r.summary());
    if (r.name != "normal-form count") out.require(r.cases >= 1000, r.name + " ran fewer than 1000 cases");
  }
  out.note(std::to_string(results.size()) + " suites, " + std::to_string(cases) + " cases");
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "matching Z against Z^2, eps 1/2", 10, [](Outcome& o) { matching(o, Rational(1, 2)); }},
      {1, "matching Z against Z^2, eps 1/4", 10, [](Outcome& o) { matching(o, Rational(1, 4)); }},
      {1, "matching Z against Z^2, eps 1/10", 10, [](Outcome& o) { matching(o, Rational(1, 10)); }},
      {2, "prescribed-size Følner sets in Z^2", 30, prescribed},
      {3, "generic action certificate, L 3, eps 1/5", 60, generic},
      {4, "Bass-Serre rank of doubles", 5, bass_serre},
      {5, "supp_A on free regular actions", 60, supports},
      {6, "invariant suites", 120, invariants},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.limit_s) out.require(false, "runtime over the limit");
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (out.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << secs << " s, limit " << c.limit_s
         << " s)";
    for (const auto& n : out.notes) line << "\n    " << n;
    std::puts(line.str().c_str());
    failed += !out.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
