#include "doctest.h"

#include "amalgact/config.hpp"
#include "amalgact/error.hpp"
#include "fixtures.hpp"

using namespace amalgact;

namespace {

// Key path of the ConfigError thrown by f, or "" when nothing (or something else) is thrown.
template <class F>
std::string failing_key(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  } catch (...) {
    return "<other>";
  }
  return "";
}

Json amalgam_doc(const std::string& name) { return fixtures::amalgam_presets().at(name); }

}  // namespace

TEST_CASE("rationals come as integers or p/q strings") {
  CHECK(parse_rational_field(Json(3), "eps") == Rational(3));
  CHECK(parse_rational_field(Json("2/8"), "eps") == Rational(1, 4));
  CHECK(failing_key([] { parse_rational_field(Json("0.25"), "eps"); }) == "eps");
  CHECK(failing_key([] { parse_rational_field(Json("1/0"), "eps"); }) == "eps");
  CHECK(failing_key([] { parse_rational_field(Json(true), "x.eps"); }) == "x.eps");
}

TEST_CASE("group descriptions") {
  GroupLibrary lib;
  CHECK(*lib.parse_group(Json::parse(R"({"cyclic": 7})"), "g").order() == 7);
  CHECK(*lib.parse_group(Json::parse(R"({"permutations": {"degree": 3, "generators": [[1,0,2],[1,2,0]]}})"), "g")
             .order() == 6);
  CHECK(lib.parse_group(Json::parse(R"({"free_abelian": 3})"), "g").rank() == 3);
  auto P = lib.parse_group(Json::parse(R"({"product": [{"cyclic": 2}, {"cyclic": 3}]})"), "g");
  CHECK(*P.order() == 6);
  auto T = lib.parse_group(
      Json::parse(R"({"table": {"names": ["e", "a"], "rows": [[0, 1], [1, 0]], "generators": [1]}})"), "g");
  CHECK(T.name(multiply(T.parse("a"), T.parse("a"))) == "e");
}

TEST_CASE("errors name the offending key") {
  GroupLibrary lib;
  CHECK(failing_key([&] { lib.parse_group(Json::parse(R"({"cyclic": 0})"), "groups.x.group"); }) ==
        "groups.x.group.cyclic");
  CHECK(failing_key([&] { lib.parse_group(Json::parse(R"({"cylic": 4})"), "g"); }) == "g.cylic");
  CHECK(failing_key([&] { lib.parse_group(Json::parse(R"("nope")"), "g"); }) == "g");
  CHECK(failing_key([&] {
          lib.parse_group(Json::parse(R"({"product": [{"cyclic": 2}, {"cyclic": -1}]})"), "g");
        }).rfind("g.product[1]", 0) == 0);
  CHECK(failing_key([&] {
          lib.parse_group(Json::parse(R"({"table": {"names": ["e"], "rows": [[0]], "generators": [0], "x": 1}})"), "g");
        }) == "g.table.x");

  const auto& Z4 = fixtures::library().group("z4");
  CHECK(failing_key([&] { parse_elements(Z4, Json::parse(R"(["0", "9"])"), "s"); }) == "s[1]");
  CHECK(failing_key([&] { parse_subgroup(Z4, Json::parse(R"(["0", "1"])"), "A"); }) == "A");
  CHECK(parse_subgroup(Z4, Json::parse(R"({"generated_by": ["1"]})"), "A").size() == 4);
  CHECK(parse_subgroup(Z4, Json("trivial"), "A").size() == 1);
  CHECK(parse_elements(Z4, Json("all"), "s").size() == 4);
}

TEST_CASE("group documents") {
  auto doc = Json::parse(R"({"groups": {
      "c4": {"group": {"cyclic": 4}, "subgroups": {"half": ["0", "2"]}},
      "pair": {"group": {"product": ["c4", {"cyclic": 2}]}}}})");
  auto lib = GroupLibrary::from_json(doc);
  CHECK(lib.names() == std::vector<std::string>{"c4", "pair"});
  CHECK(*lib.group("pair").order() == 8);
  CHECK(lib.subgroups("c4").at(0).first == "half");
  doc["groups"]["c4"]["colour"] = "red";
  CHECK(failing_key([&] { GroupLibrary::from_json(doc); }) == "groups.c4.colour");
  CHECK(failing_key([&] { fixtures::library().group("nope"); }) != "");
}

TEST_CASE("amalgam documents") {
  auto cfg = parse_amalgam(amalgam_doc("zxz2-sym3"), fixtures::library(), "zxz2-sym3");
  CHECK(cfg.L == 3);
  CHECK(cfg.eps == Rational(1, 5));
  CHECK(cfg.word_radius == 2u);
  CHECK(cfg.Y.has_value());
  CHECK(cfg.spec.A(Side::G).size() == 2);

  auto free = parse_amalgam(amalgam_doc("double-like"), fixtures::library(), "double-like");
  CHECK(free.spec.A(Side::G).size() == 1);

  auto bad = amalgam_doc("zxz2-sym3");
  bad["colour"] = 1;
  CHECK(failing_key([&] { parse_amalgam(bad, fixtures::library(), "a"); }) == "a.colour");
  bad = amalgam_doc("zxz2-sym3");
  bad["eps"] = "-1/5";
  CHECK(failing_key([&] { parse_amalgam(bad, fixtures::library(), "a"); }) == "a.eps");
  bad = amalgam_doc("zxz2-sym3");
  bad["phi"][1][1] = "120";
  CHECK(failing_key([&] { parse_amalgam(bad, fixtures::library(), "a"); }).rfind("a.phi", 0) == 0);
  bad = amalgam_doc("zxz2-sym3");
  bad.erase("A_H");
  CHECK(failing_key([&] { parse_amalgam(bad, fixtures::library(), "a"); }) != "");
  bad = amalgam_doc("zxz2-sym3");
  bad["Y"] = Json::parse(R"({"orbit": true})");
  CHECK(failing_key([&] { parse_amalgam(bad, fixtures::library(), "a"); }).rfind("a.Y", 0) == 0);
  bad = amalgam_doc("z-z5");
  bad["Y"]["quotient"]["images"] = Json::parse(R"(["1", "2"])");
  CHECK(failing_key([&] { parse_amalgam(bad, fixtures::library(), "a"); }) != "");
}
