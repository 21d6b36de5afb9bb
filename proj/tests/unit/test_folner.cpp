#include "doctest.h"

#include <algorithm>
#include <set>

#include "amalgact/error.hpp"
#include "amalgact/folner.hpp"
#include "fixtures.hpp"

using namespace amalgact;

namespace {

using Pt = std::pair<std::int64_t, std::int64_t>;

std::vector<Element> interval(const GroupSpec& Z, std::int64_t lo, std::int64_t hi) {
  std::vector<Element> out;
  for (auto i = lo; i < hi; ++i) out.push_back(Z.vector_element({i}));
  return out;
}

// Plain integer-pair oracle for the diamond |x| + |y| <= k.
std::set<Pt> diamond(std::int64_t k) {
  std::set<Pt> out;
  for (auto x = -k; x <= k; ++x) {
    for (auto y = -k; y <= k; ++y) {
      if (std::abs(x) + std::abs(y) <= k) out.insert({x, y});
    }
  }
  return out;
}

std::size_t pair_boundary(const std::set<Pt>& C) {
  const Pt steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::size_t n = 0;
  for (auto [x, y] : C) {
    for (auto [dx, dy] : steps) n += C.count({x + dx, y + dy}) == 0;
  }
  return n;
}

}  // namespace

TEST_CASE("ratios of intervals and boxes") {
  auto Z = GroupSpec::free_abelian(1);
  for (std::int64_t n = 1; n <= 30; ++n) {
    auto C = interval(Z, 0, n);
    for (const auto& g : Z.symmetric_generators()) CHECK(ratio(C, g) == Rational(2, n));
    // translating by n or more moves the interval off itself
    CHECK(ratio(C, Z.vector_element({n})) == Rational(2));
  }
  auto act = ActionSpec::regular(GroupSpec::free_abelian(2));
  const auto& Z2 = act.group();
  for (std::int64_t n = 1; n <= 12; ++n) {
    std::vector<PointId> pts;
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) pts.push_back(act.space().point_of(Z2.vector_element({i, j})));
    }
    auto C = make_folner_set(pts);
    for (const auto& g : Z2.symmetric_generators()) CHECK(ratio(act, C, g) == Rational(2, n));
  }
}

TEST_CASE("Følner verdicts are strict") {
  auto Z = GroupSpec::free_abelian(1);
  auto C = interval(Z, 0, 10);
  const auto& F = Z.symmetric_generators();
  CHECK_FALSE(is_folner(C, F, Rational(1, 5)).verdict);
  CHECK(is_folner(C, F, Rational(21, 100)).verdict);
  auto r = is_folner(C, F, Rational(1, 5));
  CHECK(r.ratios.size() == F.size());
}

TEST_CASE("Cayley balls of Z^2 against the diamond oracle") {
  auto Z2 = GroupSpec::free_abelian(2);
  const auto& S = Z2.symmetric_generators();
  auto spheres = cayley_spheres(Z2, S, 12);
  std::size_t total = 0;
  for (std::size_t k = 0; k <= 12; ++k) {
    auto oracle = diamond(static_cast<std::int64_t>(k));
    auto ball = cayley_ball(Z2, S, k);
    total += spheres[k].size();
    CHECK(ball.size() == oracle.size());
    CHECK(ball.size() == 2 * k * k + 2 * k + 1);
    CHECK(total == ball.size());
    std::set<Pt> got;
    for (const auto& g : ball) got.insert({g.coords()[0], g.coords()[1]});
    CHECK(got == oracle);
    CHECK(edge_boundary(S, ball) == pair_boundary(oracle));
  }
}

TEST_CASE("prescribed sizes on Z^2") {
  auto Z2 = GroupSpec::free_abelian(2);
  const auto& S = Z2.symmetric_generators();
  std::vector<std::size_t> sizes{1, 2, 5, 7, 13, 18, 25, 30, 41, 50, 61, 70, 85, 100, 113, 130, 145, 160, 181, 200};
  auto terms = prescribed_size_folner(Z2, S, sizes);
  REQUIRE(terms.size() == sizes.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    CHECK(t.n == i + 1);
    CHECK(t.F.size() == sizes[i]);
    // k is the largest radius whose diamond fits
    CHECK(2 * t.k * t.k + 2 * t.k + 1 <= sizes[i]);
    CHECK(2 * (t.k + 1) * (t.k + 1) + 2 * (t.k + 1) + 1 > sizes[i]);
    auto oracle = diamond(static_cast<std::int64_t>(t.k));
    std::set<Pt> F;
    for (const auto& g : t.F) F.insert({g.coords()[0], g.coords()[1]});
    CHECK(std::includes(F.begin(), F.end(), oracle.begin(), oracle.end()));
    for (auto [x, y] : F) CHECK(std::abs(x) + std::abs(y) <= static_cast<std::int64_t>(t.k) + 1);
    CHECK(t.boundary == pair_boundary(F));
    CHECK(t.ratio == Rational(static_cast<std::int64_t>(t.boundary), static_cast<std::int64_t>(sizes[i])));
    const auto bk = static_cast<std::int64_t>(pair_boundary(oracle));
    CHECK(t.bound == Rational(5 * bk, static_cast<std::int64_t>(oracle.size())));
    CHECK(t.holds);
    CHECK(t.ratio <= t.bound);
  }
  auto csv = prescribed_csv(terms);
  CHECK(csv.rfind("n,size,boundary,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<std::ptrdiff_t>(sizes.size() + 1));
}

TEST_CASE("matching an interval of Z against boxes of Z^2") {
  auto Z = GroupSpec::free_abelian(1);
  auto Z2 = GroupSpec::free_abelian(2);
  auto H = ActionSpec::regular(Z2);
  auto C0 = interval(Z, 0, 10);
  FolnerStream boxes = [&](std::size_t n) -> std::optional<FolnerSet> {
    std::vector<PointId> pts;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        pts.push_back(H.space().point_of(
            Z2.vector_element({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)})));
      }
    }
    return make_folner_set(std::move(pts));
  };
  for (auto eps : {Rational(1, 2), Rational(1, 4), Rational(1, 10)}) {
    // oracle: least n with n^2 > lambda * 10 and 2/n < eps/4
    const Rational lambda = std::max(Rational(8) / eps, Rational(2));
    std::size_t n = 1;
    while (!(Rational(static_cast<std::int64_t>(n * n)) > lambda * 10 &&
             Rational(2, static_cast<std::int64_t>(n)) < eps / 4)) {
      ++n;
    }
    auto m = match_cardinalities(Z, C0, H, boxes, eps, Z.symmetric_generators(), Z2.symmetric_generators());
    CHECK(m.lambda == lambda);
    CHECK(m.n == n);
    CHECK(m.d == n * n / 10);
    CHECK(m.r == n * n % 10);
    CHECK(m.c_prime.size() == m.d_prime.size());
    CHECK(m.c_prime.size() == 10 * m.d);
    CHECK(m.translates.size() == m.d);
    CHECK(m.bounds_hold);
    CHECK(m.c_report.verdict);
    CHECK(m.d_report.verdict);
    // the translates are pairwise disjoint
    std::set<std::int64_t> seen;
    for (const auto& c : m.c_prime) seen.insert(c.coords()[0]);
    CHECK(seen.size() == m.c_prime.size());
    // the deleted points are the r largest of D_n
    CHECK(std::equal(m.deleted.begin(), m.deleted.end(), m.d_n.end() - static_cast<std::ptrdiff_t>(m.r)));
  }
  SUBCASE("an exhausted stream is reported") {
    MatchOptions opts;
    opts.max_stream = 5;
    CHECK_THROWS_AS(match_cardinalities(Z, C0, H, boxes, Rational(1, 2), Z.symmetric_generators(),
                                        Z2.symmetric_generators(), opts),
                    SearchExhausted);
  }
}

TEST_CASE("disjointify on Z against a brute-force oracle") {
  auto Z = GroupSpec::free_abelian(1);
  std::vector<std::vector<Element>> seq;
  for (std::int64_t n = 1; n <= 8; ++n) seq.push_back(interval(Z, 0, n));
  auto out = disjointify(Z, FiniteSubgroup::trivial(Z), seq);
  CHECK(out[0] == interval(Z, 0, 1));
  CHECK(out[1] == interval(Z, 1, 3));
  CHECK(out[2] == interval(Z, -3, 0));
  // oracle: shifts tried in the order 0, -1, 1, -2, 2, ...
  std::set<std::int64_t> used;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto n = static_cast<std::int64_t>(i + 1);
    for (std::int64_t k = 0;; ++k) {
      const std::int64_t h = k == 0 ? 0 : (k % 2 == 1 ? -(k + 1) / 2 : k / 2);
      bool clash = false;
      for (std::int64_t x = h; x < h + n; ++x) clash = clash || used.count(x);
      if (clash) continue;
      for (std::int64_t x = h; x < h + n; ++x) used.insert(x);
      CHECK(out[i] == interval(Z, h, h + n));
      break;
    }
  }
}

TEST_CASE("right translation preserves ratios") {
  for (const char* name : {"zz", "zxz2", "sym4", "q8"}) {
    const auto& G = fixtures::library().group(name);
    auto r = prop::check(std::string("translation in ") + name, 1000, 41, [&](prop::Rng& rng, std::string& why) {
      std::vector<Element> C;
      const auto k = 1 + rng.below(12);
      for (std::size_t i = 0; i < k; ++i) C.push_back(fixtures::random_element(G, rng, 3));
      std::sort(C.begin(), C.end());
      C.erase(std::unique(C.begin(), C.end()), C.end());
      auto h = fixtures::random_element(G, rng, 10);
      auto g = fixtures::random_element(G, rng, 3);
      std::vector<Element> Ch;
      for (const auto& c : C) Ch.push_back(multiply(c, h));
      why = "g = " + G.name(g) + ", h = " + G.name(h);
      return ratio(C, g) == ratio(Ch, g);
    });
    CHECK_MESSAGE(r.passed, r.summary());
  }
}

TEST_CASE("disjointify keeps ratios and separates A-saturations") {
  const auto& G = fixtures::library().group("zxz2");
  const auto& A = fixtures::library().subgroups("zxz2")[1].second;
  REQUIRE(A.size() == 2);
  auto r = prop::check("disjointify in Z x Z/2", 1000, 42, [&](prop::Rng& rng, std::string& why) {
    std::vector<std::vector<Element>> seq;
    for (int t = 0; t < 3; ++t) {
      std::vector<Element> C;
      const auto k = 1 + rng.below(6);
      for (std::size_t i = 0; i < k; ++i) C.push_back(fixtures::random_element(G, rng, 4));
      std::sort(C.begin(), C.end());
      C.erase(std::unique(C.begin(), C.end()), C.end());
      seq.push_back(C);
    }
    auto out = disjointify(G, A, seq);
    ElementSet seen;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      for (const auto& g : G.symmetric_generators()) {
        if (ratio(seq[t], g) != ratio(out[t], g)) {
          why = "ratio changed in term " + std::to_string(t);
          return false;
        }
      }
      ElementSet mine;
      for (const auto& a : A.elements()) {
        for (const auto& c : out[t]) mine.insert(multiply(a, c));
      }
      for (const auto& x : mine) {
        if (!seen.insert(x).second) {
          why = "overlap at " + G.name(x);
          return false;
        }
      }
    }
    return true;
  });
  CHECK_MESSAGE(r.passed, r.summary());
}
