#include "amalgact/config.hpp"

#include <algorithm>
#include <fstream>

#include "amalgact/error.hpp"

namespace amalgact {

namespace {

std::string sub(const std::string& key, const std::string& child) { return key.empty() ? child : key + "." + child; }
std::string at(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

template <class T>
T get(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

const Json& field(const Json& j, const std::string& key, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ConfigError(sub(key, name), "missing");
  return j.at(name);
}

std::size_t get_count(const Json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ConfigError(key, "expected a non-negative integer");
  return j.get<std::size_t>();
}

}  // namespace

void require_keys(const Json& j, const std::string& key, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(key, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      throw ConfigError(sub(key, k), "unknown key");
    }
  }
}

Rational parse_rational_field(const Json& j, const std::string& key) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) throw ConfigError(key, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

std::vector<Element> parse_elements(const GroupSpec& G, const Json& j, const std::string& key) {
  if (j.is_string() && j.get<std::string>() == "all") {
    if (!G.is_finite()) throw ConfigError(key, "'all' needs a finite group");
    return enumerate(G, *G.order());
  }
  if (!j.is_array()) throw ConfigError(key, "expected a list of element names");
  std::vector<Element> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto name = get<std::string>(j[i], at(key, i));
    try {
      out.push_back(G.parse(name));
    } catch (const Error& e) {
      throw ConfigError(at(key, i), e.what());
    }
  }
  return out;
}

FiniteSubgroup parse_subgroup(const GroupSpec& G, const Json& j, const std::string& key) {
  try {
    if (j.is_string() && j.get<std::string>() == "trivial") return FiniteSubgroup::trivial(G);
    if (j.is_object()) {
      require_keys(j, key, {"generated_by"});
      auto gens = parse_elements(G, field(j, key, "generated_by"), sub(key, "generated_by"));
      return FiniteSubgroup::generated_by(G, gens);
    }
    return FiniteSubgroup(G, parse_elements(G, j, key));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

GroupSpec GroupLibrary::parse_group(const Json& j, const std::string& key) const {
  if (j.is_string()) {
    auto name = j.get<std::string>();
    auto it = groups_.find(name);
    if (it == groups_.end()) throw ConfigError(key, "unknown group '" + name + "'");
    return it->second;
  }
  if (!j.is_object() || j.size() != 1) throw ConfigError(key, "expected a group name or a one-key group object");
  const auto first = j.begin();
  const std::string kind = first.key();
  const Json& body = first.value();
  const std::string k = sub(key, kind);
  try {
    if (kind == "cyclic") {
      auto n = get_count(body, k);
      if (n == 0) throw ConfigError(k, "order must be positive");
      return GroupSpec::cyclic(n);
    }
    if (kind == "permutations") {
      require_keys(body, k, {"degree", "generators"});
      auto degree = get_count(field(body, k, "degree"), sub(k, "degree"));
      auto gens = get<std::vector<std::vector<std::size_t>>>(field(body, k, "generators"), sub(k, "generators"));
      return GroupSpec::from_permutations(degree, std::move(gens));
    }
    if (kind == "table") {
      require_keys(body, k, {"names", "rows", "generators"});
      auto names = get<std::vector<std::string>>(field(body, k, "names"), sub(k, "names"));
      auto rows = get<std::vector<std::vector<std::size_t>>>(field(body, k, "rows"), sub(k, "rows"));
      auto gens = get<std::vector<std::size_t>>(field(body, k, "generators"), sub(k, "generators"));
      return GroupSpec::finite_table(std::move(names), std::move(rows), std::move(gens));
    }
    if (kind == "free_abelian") {
      if (body.is_number()) return GroupSpec::free_abelian(get_count(body, k));
      require_keys(body, k, {"rank", "generators"});
      auto rank = get_count(field(body, k, "rank"), sub(k, "rank"));
      if (!body.contains("generators")) return GroupSpec::free_abelian(rank);
      auto gens = get<std::vector<IntVector>>(body.at("generators"), sub(k, "generators"));
      return GroupSpec::free_abelian(rank, std::move(gens));
    }
    if (kind == "product") {
      if (!body.is_array() || body.empty()) throw ConfigError(k, "expected a nonempty list of groups");
      std::vector<GroupSpec> parts;
      for (std::size_t i = 0; i < body.size(); ++i) parts.push_back(parse_group(body[i], at(k, i)));
      return GroupSpec::direct_product(std::move(parts));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(k, e.what());
  }
  throw ConfigError(k, "unknown group kind");
}

GroupLibrary GroupLibrary::from_json(const Json& doc, const std::string& key) {
  GroupLibrary lib;
  const Json& groups = field(doc, "", key.c_str());
  if (!groups.is_object()) throw ConfigError(key, "expected an object of named groups");
  for (const auto& [name, entry] : groups.items()) {
    const std::string k = sub(key, name);
    require_keys(entry, k, {"group", "subgroups", "description"});
    GroupSpec G = lib.parse_group(field(entry, k, "group"), sub(k, "group"));
    std::vector<std::pair<std::string, FiniteSubgroup>> subs;
    if (entry.contains("subgroups")) {
      const auto& s = entry.at("subgroups");
      if (!s.is_object()) throw ConfigError(sub(k, "subgroups"), "expected an object of named subgroups");
      for (const auto& [sname, sj] : s.items()) {
        subs.emplace_back(sname, parse_subgroup(G, sj, sub(sub(k, "subgroups"), sname)));
      }
    }
    lib.groups_.emplace(name, G);
    lib.subgroups_.emplace(name, std::move(subs));
    lib.order_.push_back(name);
  }
  return lib;
}

namespace {

Json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(file.string(), e.what());
  }
}

}  // namespace

GroupLibrary GroupLibrary::load(const std::filesystem::path& file) { return from_json(read_json(file)); }

const GroupSpec& GroupLibrary::group(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw ConfigError(name, "unknown group");
  return it->second;
}

const std::vector<std::pair<std::string, FiniteSubgroup>>& GroupLibrary::subgroups(const std::string& name) const {
  auto it = subgroups_.find(name);
  if (it == subgroups_.end()) throw ConfigError(name, "unknown group");
  return it->second;
}

AmalgamConfig parse_amalgam(const Json& j, const GroupLibrary& library, const std::string& key) {
  require_keys(j, key,
               {"G", "H", "A_G", "A_H", "phi", "Y", "word_radius", "L", "eps", "prefix", "matches", "description"});
  GroupSpec G = library.parse_group(field(j, key, "G"), sub(key, "G"));
  GroupSpec H = library.parse_group(field(j, key, "H"), sub(key, "H"));

  const bool has_a = j.contains("A_G") || j.contains("A_H") || j.contains("phi");
  std::optional<AmalgamSpec> spec;
  if (!has_a) {
    spec = AmalgamSpec::free_product(G, H);
  } else {
    auto AG = parse_subgroup(G, field(j, key, "A_G"), sub(key, "A_G"));
    auto AH = parse_subgroup(H, field(j, key, "A_H"), sub(key, "A_H"));
    const auto& pj = field(j, key, "phi");
    const std::string pk = sub(key, "phi");
    if (!pj.is_array()) throw ConfigError(pk, "expected a list of [g, h] pairs");
    std::map<Element, Element> phi;
    for (std::size_t i = 0; i < pj.size(); ++i) {
      auto pair = get<std::vector<std::string>>(pj[i], at(pk, i));
      if (pair.size() != 2) throw ConfigError(at(pk, i), "expected [g, h]");
      try {
        phi[G.parse(pair[0])] = H.parse(pair[1]);
      } catch (const Error& e) {
        throw ConfigError(at(pk, i), e.what());
      }
    }
    std::vector<Element> images;
    for (const auto& a : AG.elements()) {
      auto it = phi.find(a);
      if (it == phi.end()) throw ConfigError(pk, "no image for " + G.name(a));
      images.push_back(it->second);
    }
    try {
      spec = AmalgamSpec(G, H, AG, AH, std::move(images));
    } catch (const Error& e) {
      throw ConfigError(pk, e.what());
    }
  }

  AmalgamConfig cfg{*spec, std::nullopt, std::nullopt};
  if (j.contains("Y")) {
    const auto& y = j.at("Y");
    const std::string yk = sub(key, "Y");
    if (!y.is_object() || y.size() != 1) throw ConfigError(yk, "expected one of regular, cosets, quotient");
    const auto first = y.begin();
    const std::string kind = first.key();
    const Json& body = first.value();
    try {
      if (kind == "regular") {
        cfg.Y = ActionSpec::regular(H);
      } else if (kind == "cosets") {
        cfg.Y = ActionSpec::cosets(parse_subgroup(H, body, sub(yk, kind)));
      } else if (kind == "quotient") {
        const std::string qk = sub(yk, kind);
        require_keys(body, qk, {"target", "images"});
        GroupSpec Q = library.parse_group(field(body, qk, "target"), sub(qk, "target"));
        auto imgs = parse_elements(Q, field(body, qk, "images"), sub(qk, "images"));
        cfg.Y = ActionSpec::quotient(Homomorphism(H, Q, std::move(imgs)));
      } else {
        throw ConfigError(sub(yk, kind), "unknown action kind");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(sub(yk, kind), e.what());
    }
  }
  if (j.contains("word_radius")) cfg.word_radius = get_count(j.at("word_radius"), sub(key, "word_radius"));
  if (j.contains("L")) cfg.L = get_count(j.at("L"), sub(key, "L"));
  if (j.contains("eps")) {
    cfg.eps = parse_rational_field(j.at("eps"), sub(key, "eps"));
    if (!(cfg.eps > Rational(0))) throw ConfigError(sub(key, "eps"), "must be positive");
  }
  if (j.contains("prefix")) cfg.prefix = get_count(j.at("prefix"), sub(key, "prefix"));
  if (j.contains("matches")) cfg.matches = get_count(j.at("matches"), sub(key, "matches"));
  return cfg;
}

std::filesystem::path preset_dir() {
#ifdef AMALGACT_PRESET_DIR
  return AMALGACT_PRESET_DIR;
#else
  return "presets";
#endif
}

}  // namespace amalgact
