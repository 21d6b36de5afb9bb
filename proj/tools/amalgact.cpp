// Command-line front end: presets, Følner computations, action certificates, Bass-Serre reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "amalgact/bass_serre.hpp"
#include "amalgact/config.hpp"
#include "amalgact/error.hpp"
#include "amalgact/folner.hpp"
#include "amalgact/generic.hpp"
#include "amalgact/serialize.hpp"

using namespace amalgact;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailed = 2;

struct Common {
  std::string out;
  std::string config;
  std::string presets;
  std::uint64_t seed = 0;
};

std::filesystem::path presets_dir(const Common& c) { return c.presets.empty() ? preset_dir() : std::filesystem::path(c.presets); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError(path, "cannot write file");
  out << text;
}

void emit(const Common& c, Json report) {
  report["seed"] = c.seed;
  write_text(c.out, report.dump(2) + "\n");
}

Rational parse_eps(const std::string& text, const std::string& key) {
  Rational r = parse_rational_field(Json(text), key);
  if (!(r > Rational(0))) throw ConfigError(key, "must be positive");
  return r;
}

GroupLibrary load_library(const Common& c) { return GroupLibrary::load(presets_dir(c) / "groups.json"); }

// ---- ratio ----

struct RatioArgs {
  std::string preset;
  std::optional<std::size_t> n, k;
};

int cmd_ratio(const Common& c, const RatioArgs& a) {
  Json report;
  report["command"] = "ratio";
  GroupSpec G = GroupSpec::free_abelian(1);
  std::vector<Element> C;
  std::vector<Element> F;
  if (!c.config.empty()) {
    Json j = read_json_file(c.config);
    require_keys(j, "", {"group", "set", "test_set"});
    auto lib = load_library(c);
    if (!j.contains("group")) throw ConfigError("group", "missing");
    G = lib.parse_group(j.at("group"), "group");
    if (!j.contains("set")) throw ConfigError("set", "missing");
    C = parse_elements(G, j.at("set"), "set");
    F = j.contains("test_set") ? parse_elements(G, j.at("test_set"), "test_set") : G.symmetric_generators();
    report["preset"] = nullptr;
  } else {
    report["preset"] = a.preset;
    if (a.preset == "z-interval") {
      std::size_t n = a.n.value_or(10);
      if (n == 0) throw ConfigError("n", "must be positive");
      for (std::size_t i = 0; i < n; ++i) C.push_back(G.vector_element({static_cast<std::int64_t>(i)}));
      report["parameters"] = {{"n", n}};
    } else if (a.preset == "z2-box") {
      G = GroupSpec::free_abelian(2);
      std::size_t n = a.n.value_or(8);
      if (n == 0) throw ConfigError("n", "must be positive");
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          C.push_back(G.vector_element({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)}));
        }
      }
      report["parameters"] = {{"n", n}};
    } else if (a.preset == "z2-ball") {
      G = GroupSpec::free_abelian(2);
      std::size_t k = a.k.value_or(5);
      C = cayley_ball(G, G.symmetric_generators(), k);
      report["parameters"] = {{"k", k}};
    } else {
      throw ConfigError("preset", "unknown ratio preset '" + a.preset + "' (z-interval, z2-box, z2-ball)");
    }
    F = G.symmetric_generators();
  }
  std::sort(C.begin(), C.end());
  C.erase(std::unique(C.begin(), C.end()), C.end());
  report["size"] = C.size();
  Json ratios = Json::array();
  for (const auto& g : F) ratios.push_back({{"generator", G.name(g)}, {"ratio", to_string(ratio(C, g))}});
  report["ratios"] = ratios;
  emit(c, report);
  return kOk;
}

// ---- match-folner ----

struct MatchArgs {
  std::string eps = "1/2";
  std::size_t c0 = 10;
  std::size_t max_stream = 4096;
};

int cmd_match(const Common& c, MatchArgs a) {
  if (!c.config.empty()) {
    Json j = read_json_file(c.config);
    require_keys(j, "", {"eps", "c0", "max_stream"});
    if (j.contains("eps")) a.eps = to_string(parse_rational_field(j.at("eps"), "eps"));
    if (j.contains("c0")) a.c0 = j.at("c0").get<std::size_t>();
    if (j.contains("max_stream")) a.max_stream = j.at("max_stream").get<std::size_t>();
  }
  const Rational eps = parse_eps(a.eps, "eps");
  if (a.c0 == 0) throw ConfigError("c0", "must be positive");

  // C0 = {0, ..., c0 - 1} in Z against the boxes [0, n)^2 in Z^2
  GroupSpec Z = GroupSpec::free_abelian(1);
  GroupSpec Z2 = GroupSpec::free_abelian(2);
  std::vector<Element> C0;
  for (std::size_t i = 0; i < a.c0; ++i) C0.push_back(Z.vector_element({static_cast<std::int64_t>(i)}));
  ActionSpec H = ActionSpec::regular(Z2);
  FolnerStream boxes = [&](std::size_t n) -> std::optional<FolnerSet> {
    std::vector<PointId> pts;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        pts.push_back(H.space().point_of(Z2.vector_element({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)})));
      }
    }
    return make_folner_set(std::move(pts));
  };

  Json report;
  report["command"] = "match-folner";
  report["eps"] = to_string(eps);
  report["c0"] = a.c0;
  MatchOptions opts;
  opts.max_stream = a.max_stream;
  try {
    auto m = match_cardinalities(Z, C0, H, boxes, eps, Z.symmetric_generators(), Z2.symmetric_generators(), opts);
    Json body = to_json(Z, m);
    body["d_report"] = to_json(Z2, m.d_report);
    report["match"] = body;
    report["sizes_equal"] = m.c_prime.size() == m.d_prime.size();
    report["passed"] = m.bounds_hold && m.c_report.verdict && m.d_report.verdict && m.c_prime.size() == m.d_prime.size();
  } catch (const SearchExhausted& e) {
    report["passed"] = false;
    report["failure"] = e.what();
  }
  emit(c, report);
  return report["passed"].get<bool>() ? kOk : kFailed;
}

// ---- prescribed-folner ----

struct PrescribedArgs {
  std::string group = "zz";
  std::vector<std::size_t> sizes{1, 2, 5, 7, 13, 18, 25, 30, 41, 50, 61, 70, 85, 100, 113, 130, 145, 160, 181, 200};
  std::string csv;
};

int cmd_prescribed(const Common& c, PrescribedArgs a) {
  auto lib = load_library(c);
  if (!c.config.empty()) {
    Json j = read_json_file(c.config);
    require_keys(j, "", {"group", "sizes"});
    if (j.contains("group")) a.group = j.at("group").get<std::string>();
    if (j.contains("sizes")) a.sizes = j.at("sizes").get<std::vector<std::size_t>>();
  }
  if (!lib.has(a.group)) throw ConfigError("group", "unknown group '" + a.group + "'");
  const auto& G = lib.group(a.group);
  auto terms = prescribed_size_folner(G, G.symmetric_generators(), a.sizes);
  Json rows = Json::array();
  bool ok = true;
  for (const auto& t : terms) {
    rows.push_back(to_json(G, t));
    ok = ok && t.holds && t.F.size() == t.a;
  }
  if (!a.csv.empty()) write_text(a.csv, prescribed_csv(terms));
  emit(c, {{"command", "prescribed-folner"}, {"group", a.group}, {"terms", rows}, {"passed", ok}});
  return ok ? kOk : kFailed;
}

// ---- amalgam commands ----

struct AmalgamArgs {
  std::string preset;
  std::optional<std::size_t> L, prefix, matches, pairs;
  std::optional<std::string> eps;
  std::string cert_out, sigma_out;
};

std::pair<AmalgamConfig, Json> load_amalgam(const Common& c, const AmalgamArgs& a) {
  auto lib = load_library(c);
  Json j;
  if (!c.config.empty()) {
    j = read_json_file(c.config);
  } else {
    if (a.preset.empty()) throw ConfigError("preset", "give --preset or --config");
    Json doc = read_json_file((presets_dir(c) / "amalgams.json").string());
    if (!doc.contains("amalgams") || !doc["amalgams"].contains(a.preset)) {
      throw ConfigError("preset", "unknown amalgam preset '" + a.preset + "'");
    }
    j = doc["amalgams"][a.preset];
  }
  auto cfg = parse_amalgam(j, lib, c.config.empty() ? a.preset : "");
  if (a.L) cfg.L = *a.L;
  if (a.eps) cfg.eps = parse_eps(*a.eps, "eps");
  if (a.prefix) cfg.prefix = *a.prefix;
  if (a.matches) cfg.matches = *a.matches;
  if (!cfg.Y) throw ConfigError("Y", "this command needs an action Y of H");
  return {cfg, j};
}

int cmd_check_aprime(const Common& c, const AmalgamArgs& a) {
  auto [cfg, raw] = load_amalgam(c, a);
  auto w = build_aprime_witness(cfg.spec, *cfg.Y, cfg.prefix);
  AprimeFolnerStream stream(w);
  AprimeOptions opts;
  opts.prefix = cfg.prefix;
  if (a.pairs) opts.pairs = *a.pairs;
  auto rep = check_aprime(stream, opts);
  Json report{{"command", "check-aprime"}, {"preset", a.preset.empty() ? Json(nullptr) : Json(a.preset)}};
  report["report"] = to_json(w, rep);
  report["passed"] = rep.passed();
  emit(c, report);
  return rep.passed() ? kOk : kFailed;
}

int cmd_build_action(const Common& c, const AmalgamArgs& a) {
  auto [cfg, raw] = load_amalgam(c, a);
  auto w = build_aprime_witness(cfg.spec, *cfg.Y, cfg.prefix);
  AprimeFolnerStream stream(w);
  GenericOptions opts;
  opts.word_radius = cfg.word_radius;
  opts.matches = cfg.matches;
  auto res = build_generic(stream, cfg.L, cfg.eps, opts);
  auto verdict = verify_certificate(res.sigma, res.certificate, w);

  Json cert = to_json(cfg.spec, res.certificate);
  Json sigma = to_json(res.sigma);
  if (!a.cert_out.empty()) write_text(a.cert_out, cert.dump(2) + "\n");
  if (!a.sigma_out.empty()) write_text(a.sigma_out, sigma.dump(2) + "\n");

  Json report{{"command", "build-action"}, {"preset", a.preset.empty() ? Json(nullptr) : Json(a.preset)}};
  report["L"] = cfg.L;
  report["eps"] = to_string(cfg.eps);
  report["words"] = res.certificate.words.size();
  report["matches"] = res.certificate.matches.size();
  report["sigma_blocks"] = res.sigma.size();
  report["digest"] = hex64(res.certificate.digest);
  report["verified"] = verdict.ok;
  if (!verdict.ok) report["failure"] = verdict.failure;
  if (a.cert_out.empty()) report["certificate"] = cert;
  if (a.sigma_out.empty()) report["sigma"] = sigma;
  emit(c, report);
  return verdict.ok ? kOk : kFailed;
}

// ---- bass-serre ----

struct DoubleArgs {
  std::string group;
  std::string sub;
  std::size_t cutoff = 4096;
};

int cmd_bass_serre(const Common& c, const DoubleArgs& a) {
  auto lib = load_library(c);
  std::optional<Homomorphism> pi;
  std::optional<FiniteSubgroup> A;
  Json report{{"command", "bass-serre"}};
  if (!c.config.empty()) {
    // {"G": group, "H": group, "images": [...], "A": subgroup}
    Json j = read_json_file(c.config);
    require_keys(j, "", {"G", "H", "images", "A"});
    if (!j.contains("G")) throw ConfigError("G", "missing");
    GroupSpec G = lib.parse_group(j.at("G"), "G");
    if (j.contains("H")) {
      GroupSpec H = lib.parse_group(j.at("H"), "H");
      if (!j.contains("images")) throw ConfigError("images", "missing");
      try {
        pi = Homomorphism(G, H, parse_elements(H, j.at("images"), "images"));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError("images", e.what());
      }
    } else {
      pi = Homomorphism::identity(G);
    }
    if (!j.contains("A")) throw ConfigError("A", "missing");
    A = parse_subgroup(G, j.at("A"), "A");
  } else {
    if (a.group.empty()) throw ConfigError("group", "--group or --config is required");
    if (a.sub.empty()) throw ConfigError("sub", "--sub is required with --group");
    if (!lib.has(a.group)) throw ConfigError("group", "unknown group '" + a.group + "'");
    const auto& G = lib.group(a.group);
    pi = Homomorphism::identity(G);
    std::optional<FiniteSubgroup> named;
    for (const auto& [name, s] : lib.subgroups(a.group)) {
      if (name == a.sub) named = s;
    }
    if (named) {
      A = *named;
    } else if (a.sub == "all") {
      A = parse_subgroup(G, Json("all"), "sub");
    } else {
      Json names = Json::array();
      std::stringstream ss(a.sub);
      for (std::string item; std::getline(ss, item, ',');) names.push_back(item);
      A = parse_subgroup(G, names, "sub");
    }
    report["group"] = a.group;
    report["sub"] = a.sub;
  }

  HypothesisOptions opts;
  opts.scan_cutoff = a.cutoff;
  Json A_names = Json::array();
  for (const auto& x : A->elements()) A_names.push_back(pi->source().name(x));
  report["A"] = A_names;
  auto hyp = check_hypotheses(*pi, A->elements(), opts);
  report["hypotheses"] = to_json(pi->source(), hyp);
  if (!hyp.passed()) {
    report["passed"] = false;
    report["failure"] = hyp.failures.front();
    emit(c, report);
    return kFailed;
  }
  auto d = DoubleSpec::from_epimorphism(*pi, *A);
  auto graph = quotient_graph(d, opts);
  auto circuit = witness_circuit(d);
  report["graph"] = to_json(pi->target(), graph);
  report["betti"] = graph.betti;
  report["expected_betti"] = *hyp.index - 1;
  report["circuit"] = to_json(d, circuit);
  const bool ok = graph.betti == *hyp.index - 1 && circuit.passed();
  report["passed"] = ok;
  emit(c, report);
  return ok ? kOk : kFailed;
}

// ---- presets ----

int cmd_presets_list(const Common& c) {
  Json groups = read_json_file((presets_dir(c) / "groups.json").string());
  Json amalgams = read_json_file((presets_dir(c) / "amalgams.json").string());
  Json out{{"command", "presets list"}};
  Json g = Json::array();
  for (const auto& [name, entry] : groups.at("groups").items()) {
    Json subs = Json::array();
    if (entry.contains("subgroups")) {
      for (const auto& [s, v] : entry.at("subgroups").items()) subs.push_back(s);
    }
    g.push_back({{"name", name}, {"description", entry.value("description", "")}, {"subgroups", subs}});
  }
  Json am = Json::array();
  for (const auto& [name, entry] : amalgams.at("amalgams").items()) {
    am.push_back({{"name", name}, {"description", entry.value("description", "")}});
  }
  out["groups"] = g;
  out["amalgams"] = am;
  out["ratio"] = Json::array({"z-interval", "z2-box", "z2-ball"});
  emit(c, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actions of amalgamated free products: Følner sets, generic actions, Bass-Serre quotients"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Write the report here instead of stdout");
    sub->add_option("--config", common.config, "Inline JSON configuration file");
    sub->add_option("--presets", common.presets, "Directory holding groups.json and amalgams.json");
    sub->add_option("--seed", common.seed, "Recorded in the report; every command is deterministic");
  };

  RatioArgs ratio_args;
  auto* ratio_cmd = app.add_subcommand("ratio", "Per-generator Følner ratios of a set");
  ratio_cmd->add_option("preset", ratio_args.preset, "z-interval, z2-box or z2-ball");
  ratio_cmd->add_option("--n", ratio_args.n, "Interval length or box side");
  ratio_cmd->add_option("--k", ratio_args.k, "Ball radius");
  add_common(ratio_cmd);

  MatchArgs match_args;
  auto* match_cmd = app.add_subcommand("match-folner", "Equal-cardinality Følner matching of Z against Z^2");
  match_cmd->add_option("--eps", match_args.eps, "Rational p/q");
  match_cmd->add_option("--c0", match_args.c0, "|C0|, the interval {0..c0-1}");
  match_cmd->add_option("--max-stream", match_args.max_stream, "Last stream index scanned");
  add_common(match_cmd);

  PrescribedArgs pres_args;
  std::string sizes_text;
  auto* pres_cmd = app.add_subcommand("prescribed-folner", "Følner sets of prescribed sizes");
  pres_cmd->add_option("--group", pres_args.group, "Group from the preset library");
  pres_cmd->add_option("--sizes", sizes_text, "Comma-separated strictly ascending sizes");
  pres_cmd->add_option("--csv", pres_args.csv, "Write n,size,boundary,ratio rows here");
  add_common(pres_cmd);

  AmalgamArgs am_args;
  auto add_amalgam = [&](CLI::App* sub) {
    sub->add_option("--preset", am_args.preset, "Amalgam preset name");
    sub->add_option("--L", am_args.L, "Maximal syllable length");
    sub->add_option("--eps", am_args.eps, "Rational p/q");
    sub->add_option("--prefix", am_args.prefix, "Point prefix for the finite checks");
    add_common(sub);
  };
  auto* aprime_cmd = app.add_subcommand("check-aprime", "Check the four conditions on the standard witness");
  add_amalgam(aprime_cmd);
  aprime_cmd->add_option("--pairs", am_args.pairs, "Følner pairs to check");
  auto* build_cmd = app.add_subcommand("build-action", "Build and verify a generic action certificate");
  add_amalgam(build_cmd);
  build_cmd->add_option("--matches", am_args.matches, "Følner matches to schedule");
  build_cmd->add_option("--certificate", am_args.cert_out, "Write the certificate here");
  build_cmd->add_option("--sigma", am_args.sigma_out, "Write the partial permutation here");

  DoubleArgs double_args;
  auto* bs_cmd = app.add_subcommand("bass-serre", "Kernel structure of psi on a double");
  bs_cmd->require_subcommand(0, 1);
  auto* double_cmd = bs_cmd->add_subcommand("double", "Double of a group over a subgroup");
  double_cmd->add_option("--group", double_args.group, "Group from the preset library");
  double_cmd->add_option("--sub", double_args.sub, "Named subgroup, comma-separated elements, or all");
  double_cmd->add_option("--cutoff", double_args.cutoff, "Enumeration cutoff");
  add_common(double_cmd);
  add_common(bs_cmd);

  auto* presets_cmd = app.add_subcommand("presets", "Shipped presets");
  presets_cmd->require_subcommand(1);
  auto* list_cmd = presets_cmd->add_subcommand("list", "List preset groups and amalgams");
  add_common(list_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ratio_cmd) {
      if (ratio_args.preset.empty() && common.config.empty()) throw ConfigError("preset", "give a preset or --config");
      return cmd_ratio(common, ratio_args);
    }
    if (*match_cmd) return cmd_match(common, match_args);
    if (*pres_cmd) {
      if (!sizes_text.empty()) {
        pres_args.sizes.clear();
        std::stringstream ss(sizes_text);
        for (std::string item; std::getline(ss, item, ',');) {
          try {
            std::size_t used = 0;
            pres_args.sizes.push_back(std::stoul(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
          } catch (const std::exception&) {
            throw ConfigError("sizes", "not a size: '" + item + "'");
          }
        }
      }
      return cmd_prescribed(common, pres_args);
    }
    if (*aprime_cmd) return cmd_check_aprime(common, am_args);
    if (*build_cmd) return cmd_build_action(common, am_args);
    if (*bs_cmd) {
      if (!*double_cmd && common.config.empty()) throw ConfigError("bass-serre", "use 'double' or --config");
      return cmd_bass_serre(common, double_args);
    }
    if (*presets_cmd) return cmd_presets_list(common);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
