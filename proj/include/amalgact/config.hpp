#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "amalgact/actions.hpp"
#include "amalgact/amalgam.hpp"
#include "amalgact/groups.hpp"
#include "amalgact/rational.hpp"

namespace amalgact {

using Json = nlohmann::ordered_json;

/// Named groups, each with named subgroups, loaded from a JSON document of the form
///   {"groups": {"z4": {"group": {"cyclic": 4}, "subgroups": {"z2": ["0", "2"]}}, ...}}
///
/// Group descriptions:
///   {"cyclic": n}
///   {"permutations": {"degree": d, "generators": [[...], ...]}}
///   {"table": {"names": [...], "rows": [[...], ...], "generators": [i, ...]}}
///   {"free_abelian": r} or {"free_abelian": {"rank": r, "generators": [[...], ...]}}
///   {"product": [group, group, ...]}
///   "name" for a group defined earlier in the same document
/// Subgroups are a list of element names or {"generated_by": [names]}.
class GroupLibrary {
 public:
  GroupLibrary() = default;
  static GroupLibrary from_json(const Json& doc, const std::string& key = "groups");
  static GroupLibrary load(const std::filesystem::path& file);

  bool has(const std::string& name) const { return groups_.count(name) != 0; }
  const GroupSpec& group(const std::string& name) const;
  /// Named subgroups of a group, in file order.
  const std::vector<std::pair<std::string, FiniteSubgroup>>& subgroups(const std::string& name) const;
  std::vector<std::string> names() const { return order_; }

  GroupSpec parse_group(const Json& j, const std::string& key) const;

 private:
  std::map<std::string, GroupSpec> groups_;
  std::map<std::string, std::vector<std::pair<std::string, FiniteSubgroup>>> subgroups_;
  std::vector<std::string> order_;
};

std::vector<Element> parse_elements(const GroupSpec& G, const Json& j, const std::string& key);
FiniteSubgroup parse_subgroup(const GroupSpec& G, const Json& j, const std::string& key);
Rational parse_rational_field(const Json& j, const std::string& key);

/// An amalgam together with the parameters of a build-action run:
///   {"G": group, "H": group, "A_G": [names], "A_H": [names], "phi": [[g, h], ...],
///    "Y": {"regular": true} | {"cosets": [names]} | {"quotient": {"target": group, "images": [names]}},
///    "word_radius": r, "L": n, "eps": "p/q", "prefix": n, "matches": n}
/// A_G, A_H and phi may be omitted together for a free product.
struct AmalgamConfig {
  AmalgamSpec spec;
  std::optional<ActionSpec> Y;
  std::optional<std::size_t> word_radius;
  std::size_t L = 2;
  Rational eps{1, 4};
  std::size_t prefix = 200;
  std::size_t matches = 1;
};

AmalgamConfig parse_amalgam(const Json& j, const GroupLibrary& library, const std::string& key = "amalgam");

/// Reject keys outside `allowed`, naming the first offender.
void require_keys(const Json& j, const std::string& key, std::initializer_list<const char*> allowed);

/// Directory holding the shipped preset files.
std::filesystem::path preset_dir();

}  // namespace amalgact
