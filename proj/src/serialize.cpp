#include "amalgact/serialize.hpp"

#include <cstdio>
#include <set>

#include "amalgact/error.hpp"

namespace amalgact {

namespace {

Json names(const GroupSpec& G, const std::vector<Element>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(G.name(x));
  return out;
}

Json rationals(const std::vector<Rational>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(to_string(x));
  return out;
}

std::string side_name(Side s) { return std::string(1, side_letter(s)); }

Side side_from(const Json& j, const std::string& key) {
  auto s = j.get<std::string>();
  if (s == "G") return Side::G;
  if (s == "H") return Side::H;
  throw ConfigError(key, "side must be \"G\" or \"H\"");
}

// Name of an element of either factor.
std::string factor_name(const AmalgamSpec& spec, const Element& e) {
  return spec.G().owns(e) ? spec.G().name(e) : spec.H().name(e);
}

template <class T>
T read(const Json& j, const char* name, const std::string& key) {
  if (!j.is_object() || !j.contains(name)) throw ConfigError(key + "." + name, "missing");
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(key + "." + name, e.what());
  }
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

Json to_json(const GroupSpec& G, const FolnerReport& r) {
  Json j;
  j["epsilon"] = to_string(r.epsilon);
  j["test_set"] = names(G, r.test_set);
  j["ratios"] = rationals(r.ratios);
  j["verdict"] = r.verdict;
  return j;
}

Json to_json(const GroupSpec& G, const MatchResult& m) {
  Json j;
  j["lambda"] = to_string(m.lambda);
  j["n"] = m.n;
  j["d"] = m.d;
  j["r"] = m.r;
  j["size_D_n"] = m.d_n.size();
  j["size_D_prime"] = m.d_prime.size();
  j["deleted"] = m.deleted;
  j["deletion"] = m.r == 0 ? "no deletion" : "canonically largest points of D_n";
  j["c_report"] = to_json(G, m.c_report);
  j["size_ratio"] = to_string(m.size_ratio);
  j["deletion_ratio"] = to_string(m.deletion_ratio);
  j["bounds_hold"] = m.bounds_hold;
  return j;
}

Json to_json(const GroupSpec& G, const GroupMatch& m) {
  Json j = to_json(G, static_cast<const MatchResult&>(m));
  j["c0_report"] = to_json(G, m.c0_report);
  j["translates"] = names(G, m.translates);
  j["size_C_prime"] = m.c_prime.size();
  return j;
}

Json to_json(const GroupSpec& G, const PrescribedTerm& t) {
  Json j;
  j["n"] = t.n;
  j["a"] = t.a;
  j["k"] = t.k;
  j["size"] = t.F.size();
  j["ball_size"] = t.ball_size;
  j["ball_boundary"] = t.ball_boundary;
  j["extra"] = names(G, t.K);
  j["boundary"] = t.boundary;
  j["ratio"] = to_string(t.ratio);
  j["bound"] = to_string(t.bound);
  j["holds"] = t.holds;
  return j;
}

Json to_json(const AprimeWitness& w, const AprimeReport& r) {
  const auto& spec = w.spec();
  Json j;
  j["x_prefix"] = r.x_prefix;
  j["y_prefix"] = r.y_prefix;

  Json ti;
  ti["certified"] = r.transitivity.certified;
  ti["start"] = r.transitivity.start;
  ti["prefix"] = r.transitivity.prefix;
  ti["depth"] = r.transitivity.depth;
  ti["depth_used"] = r.transitivity.depth_used;
  ti["counterexample"] = r.transitivity.counterexample ? Json(*r.transitivity.counterexample) : Json(nullptr);
  j["transitivity"] = ti;

  Json sup = Json::array();
  for (const auto& s : r.supports) {
    sup.push_back({{"side", side_name(s.side)},
                   {"element", spec.group(s.side).name(s.g)},
                   {"count", s.count},
                   {"pass", s.pass}});
  }
  j["supp_threshold"] = r.supp_threshold;
  j["supports"] = sup;

  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"m", p.m},
                     {"eps", to_string(p.eps)},
                     {"size", p.size},
                     {"sizes_equal", p.sizes_equal},
                     {"x_ratio", to_string(p.x_ratio)},
                     {"y_ratio", to_string(p.y_ratio)},
                     {"disjoint", p.disjoint},
                     {"pass", p.pass}});
  }
  j["pairs"] = pairs;

  auto freeness = [&](const FreenessVerdict& v) {
    Json f;
    f["free"] = v.free;
    f["prefix"] = v.prefix;
    if (v.fixed) {
      f["fixed"] = {{"a", factor_name(spec, v.fixed->first)}, {"point", v.fixed->second}};
    } else {
      f["fixed"] = nullptr;
    }
    return f;
  };
  j["x_free"] = freeness(r.x_free);
  j["y_free"] = freeness(r.y_free);
  j["conditions"] = {{"i", r.condition_i()}, {"ii", r.condition_ii()}, {"iii", r.condition_iii()},
                     {"iv", r.condition_iv()}};
  j["passed"] = r.passed();
  return j;
}

Json to_json(const GroupSpec& G, const HypothesisReport& r) {
  Json j;
  j["surjective"] = r.surjective;
  j["injective_on_A"] = r.injective_on_A;
  j["index_ok"] = r.index_ok;
  j["a_scanned"] = r.a_scanned;
  j["a_finite"] = r.a_finite;
  j["collision"] = r.collision ? Json::array({G.name(r.collision->first), G.name(r.collision->second)}) : Json(nullptr);
  j["index"] = r.index ? Json(*r.index) : Json(nullptr);
  j["failures"] = r.failures;
  j["passed"] = r.passed();
  return j;
}

Json to_json(const GroupSpec& H, const QuotientGraph& g) {
  Json j;
  j["g_vertices"] = g.g_vertices;
  j["h_vertices"] = g.h_vertices;
  j["edges"] = names(H, g.edges);
  j["components"] = g.components;
  j["connected"] = g.connected();
  j["betti"] = g.betti;
  j["adjacency"] = g.adjacency(H);
  return j;
}

Json to_json(const DoubleSpec& d, const CircuitWitness& c) {
  const auto& spec = d.base();
  Json letters = Json::array();
  for (const auto& s : c.letters) letters.push_back(side_name(s.side) + ":" + spec.group(s.side).name(s.element));
  Json j;
  j["z"] = spec.H().name(c.z);
  j["x"] = spec.G().name(c.x);
  j["letters"] = letters;
  j["h"] = to_text(c.h);
  j["psi_h"] = spec.H().name(c.psi_h);
  j["x_inv_h"] = to_text(c.x_inv_h);
  j["psi_trivial"] = c.psi_trivial;
  j["x_outside_A"] = c.x_outside_A;
  j["x_inv_h_in_H_minus_A"] = c.x_inv_h_in_H_minus_A;
  j["passed"] = c.passed();
  return j;
}

Json to_json(const PartialPermutation& sigma) {
  const auto& B = sigma.blocks();
  std::set<PointId> bases;
  for (const auto& [x, y] : sigma.forward_table()) {
    bases.insert(x);
    bases.insert(B.base(y));
  }
  for (const auto& [y, x] : sigma.backward_table()) {
    bases.insert(y);
    bases.insert(B.base(x));
  }
  Json blocks = Json::array();
  for (auto b : bases) blocks.push_back(B.block_of(b));
  Json fwd = Json::array();
  for (const auto& [x, y] : sigma.forward_table()) fwd.push_back({x, y});
  Json bwd = Json::array();
  for (const auto& [y, x] : sigma.backward_table()) bwd.push_back({y, x});
  return {{"blocks", blocks}, {"forward", fwd}, {"backward", bwd}};
}

PartialPermutation sigma_from_json(const Json& j, const ABlockSpace& blocks) {
  const std::string key = "sigma";
  auto table = [&](const char* name) {
    std::map<PointId, PointId> out;
    for (const auto& [a, b] : read<std::vector<std::pair<PointId, PointId>>>(j, name, key)) {
      if (!out.emplace(a, b).second) throw ConfigError(key + "." + name, "duplicate entry " + std::to_string(a));
    }
    return out;
  };
  auto fwd = table("forward");
  auto bwd = table("backward");
  // the block table must agree with the action it is loaded against
  for (const auto& blk : read<std::vector<std::vector<PointId>>>(j, "blocks", key)) {
    if (blk.empty() || blocks.block_of(blk.front()) != blk) {
      throw ConfigError(key + ".blocks", "block table does not match the A-action");
    }
  }
  return PartialPermutation::from_tables(blocks, std::move(fwd), std::move(bwd));
}

Json to_json(const AmalgamSpec& spec, const Certificate& cert) {
  Json j;
  j["L"] = cert.L;
  j["word_radius"] = cert.word_radius ? Json(*cert.word_radius) : Json(nullptr);
  j["eps"] = to_string(cert.eps);
  j["requested_matches"] = cert.requested_matches;
  Json words = Json::array();
  for (const auto& w : cert.words) {
    words.push_back({{"word", to_text(w.word)}, {"x0", w.x0}, {"trace", w.trace}, {"endpoint", w.endpoint}});
  }
  j["words"] = words;
  Json matches = Json::array();
  for (const auto& m : cert.matches) {
    Json ratios = Json::array();
    for (const auto& r : m.ratios) {
      ratios.push_back({{"side", side_name(r.side)},
                        {"generator", spec.group(r.side).name(r.generator)},
                        {"ratio", to_string(r.ratio)},
                        {"raw_ratio", to_string(r.raw_ratio)}});
    }
    matches.push_back({{"m", m.m}, {"C", m.C}, {"D", m.D}, {"D_y", m.D_y}, {"ratios", ratios}});
  }
  j["matches"] = matches;
  j["digest"] = hex64(cert.digest);
  return j;
}

Certificate certificate_from_json(const Json& j, const AmalgamSpec& spec) {
  const std::string key = "certificate";
  Certificate cert;
  cert.L = read<std::size_t>(j, "L", key);
  if (j.contains("word_radius") && !j.at("word_radius").is_null()) {
    cert.word_radius = read<std::size_t>(j, "word_radius", key);
  }
  cert.eps = rational_from_json(j.at("eps"), key + ".eps");
  cert.requested_matches = read<std::size_t>(j, "requested_matches", key);
  const auto& words = j.at("words");
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string wk = key + ".words[" + std::to_string(i) + "]";
    const auto& w = words[i];
    try {
      cert.words.push_back(WordWitness{parse_word(spec, read<std::string>(w, "word", wk)),
                                       read<PointId>(w, "x0", wk), read<std::vector<PointId>>(w, "trace", wk),
                                       read<PointId>(w, "endpoint", wk)});
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(wk + ".word", e.what());
    }
  }
  const auto& matches = j.at("matches");
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const std::string mk = key + ".matches[" + std::to_string(i) + "]";
    const auto& m = matches[i];
    MatchRecord rec{read<std::size_t>(m, "m", mk), read<FolnerSet>(m, "C", mk), read<FolnerSet>(m, "D", mk),
                    read<FolnerSet>(m, "D_y", mk), {}};
    const auto& ratios = m.at("ratios");
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      const std::string rk = mk + ".ratios[" + std::to_string(k) + "]";
      const auto& r = ratios[k];
      Side side = side_from(r.at("side"), rk + ".side");
      Element g;
      try {
        g = spec.group(side).parse(read<std::string>(r, "generator", rk));
      } catch (const Error& e) {
        throw ConfigError(rk + ".generator", e.what());
      }
      rec.ratios.push_back(RatioEntry{side, g, rational_from_json(r.at("ratio"), rk + ".ratio"),
                                      rational_from_json(r.at("raw_ratio"), rk + ".raw_ratio")});
    }
    cert.matches.push_back(std::move(rec));
  }
  auto hex = read<std::string>(j, "digest", key);
  try {
    std::size_t used = 0;
    cert.digest = std::stoull(hex, &used, 16);
    if (used != hex.size()) throw std::invalid_argument(hex);
  } catch (const std::exception&) {
    throw ConfigError(key + ".digest", "expected hex digits");
  }
  return cert;
}

}  // namespace amalgact
