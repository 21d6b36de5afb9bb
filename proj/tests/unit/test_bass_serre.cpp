#include "doctest.h"

#include "amalgact/bass_serre.hpp"
#include "amalgact/error.hpp"
#include "fixtures.hpp"
#include "tree_oracle.hpp"

using namespace amalgact;

namespace {

FiniteSubgroup sub(const GroupSpec& G, std::initializer_list<const char*> names) {
  std::vector<Element> els;
  for (auto n : names) els.push_back(G.parse(n));
  return FiniteSubgroup(G, els);
}

DoubleSpec double_of(const GroupSpec& G, const FiniteSubgroup& A) {
  return DoubleSpec::from_epimorphism(Homomorphism::identity(G), A);
}

}  // namespace

TEST_CASE("hypotheses on doubles") {
  const auto& Z4 = fixtures::library().group("z4");
  auto ok = check_hypotheses(double_of(Z4, sub(Z4, {"0", "2"})));
  CHECK(ok.passed());
  CHECK(ok.index == 2u);
  auto full = check_hypotheses(double_of(Z4, sub(Z4, {"0", "1", "2", "3"})));
  CHECK_FALSE(full.passed());
  CHECK_FALSE(full.index_ok);
  CHECK(full.index == 1u);
  CHECK(full.failures.size() == 1);
}

TEST_CASE("an infinite A that collapses is caught") {
  auto Z = GroupSpec::free_abelian(1);
  auto Z4 = GroupSpec::cyclic(4);
  Homomorphism pi(Z, Z4, {Z4.parse("1"), Z4.parse("3")});
  std::vector<Element> gens{Z.vector_element({8})};
  auto r = check_hypotheses(pi, gens);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.injective_on_A);
  CHECK_FALSE(r.a_finite);
  REQUIRE(r.collision.has_value());
  const auto& [a, b] = *r.collision;
  CHECK(a != b);
  CHECK(pi(a) == pi(b));
  CHECK(a.coords()[0] % 8 == 0);
  CHECK(b.coords()[0] % 8 == 0);
  CHECK_THROWS_AS(quotient_graph(pi, gens), PreconditionError);
}

TEST_CASE("double of Z over 2Z") {
  auto Z = GroupSpec::free_abelian(1);
  std::vector<Element> gens{Z.vector_element({2})};
  auto r = check_hypotheses(Homomorphism::identity(Z), gens);
  CHECK(r.passed());
  CHECK_FALSE(r.a_finite);
  CHECK(r.coset_reps.size() >= 2);
  CHECK(r.index == 2u);
  auto q = quotient_graph(Homomorphism::identity(Z), gens);
  CHECK(q.edges.size() == 2);
  CHECK(q.betti == 1);
}

TEST_CASE("quotient graphs of small doubles") {
  const auto& Z4 = fixtures::library().group("z4");
  const auto& Z6 = fixtures::library().group("z6");
  struct Case {
    const GroupSpec* G;
    FiniteSubgroup A;
    std::size_t edges;
  };
  std::vector<Case> cases{{&Z4, sub(Z4, {"0", "2"}), 2}, {&Z6, sub(Z6, {"0", "3"}), 3}, {&Z6, sub(Z6, {"0", "2", "4"}), 2}};
  for (const auto& c : cases) {
    auto d = double_of(*c.G, c.A);
    auto q = quotient_graph(d);
    CHECK(q.edges.size() == c.edges);
    CHECK(q.betti == c.edges - 1);
    CHECK(q.connected());
    auto t = oracle::truncated_tree_quotient(d, 3);
    CHECK(t.edges == c.edges);
    CHECK(t.vertices == 2);
    CHECK(t.betti() == static_cast<long>(q.betti));
  }
  auto q = quotient_graph(double_of(Z4, sub(Z4, {"0", "2"})));
  CHECK(q.adjacency(Z4) == "vertices G0 H0\nedge G0 H0 0\nedge G0 H0 1\n");
}

TEST_CASE("circuit witnesses") {
  const auto& Z4 = fixtures::library().group("z4");
  const auto& Z6 = fixtures::library().group("z6");
  auto w4 = witness_circuit(double_of(Z4, sub(Z4, {"0", "2"})));
  CHECK(w4.z == Z4.parse("1"));
  CHECK(w4.x == Z4.parse("1"));
  REQUIRE(w4.letters.size() == 2);
  CHECK(w4.letters[1].side == Side::H);
  CHECK(w4.letters[1].element == Z4.parse("3"));
  CHECK(w4.passed());
  auto w6 = witness_circuit(double_of(Z6, sub(Z6, {"0", "3"})));
  CHECK(w6.letters[1].element == Z6.parse("5"));
  CHECK(w6.passed());
}

TEST_CASE("every proper subgroup of every finite preset") {
  for (const auto& name : fixtures::finite_groups()) {
    const auto& G = fixtures::library().group(name);
    for (const auto& [label, A] : fixtures::library().subgroups(name)) {
      if (A.size() == *G.order()) continue;
      CAPTURE(name);
      CAPTURE(label);
      auto d = double_of(G, A);
      REQUIRE(check_hypotheses(d).passed());
      auto q = quotient_graph(d);
      CHECK(q.betti == *G.order() / A.size() - 1);
      CHECK(q.betti >= 1);
      auto w = witness_circuit(d);
      CHECK(w.passed());
      CHECK(oracle::truncated_tree_quotient(d, 3).betti() == static_cast<long>(q.betti));
    }
  }
}
