#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "amalgact/config.hpp"
#include "amalgact/groups.hpp"
#include "property.hpp"

namespace fixtures {

inline const amalgact::GroupLibrary& library() {
  static const amalgact::GroupLibrary lib = amalgact::GroupLibrary::load(amalgact::preset_dir() / "groups.json");
  return lib;
}

inline amalgact::Json amalgam_presets() {
  std::ifstream in(amalgact::preset_dir() / "amalgams.json");
  return amalgact::Json::parse(in).at("amalgams");
}

inline amalgact::AmalgamConfig amalgam(const std::string& name) {
  return amalgact::parse_amalgam(amalgam_presets().at(name), library(), name);
}

/// Uniform on finite groups; coordinates in [-radius, radius] on free abelian parts.
inline amalgact::Element random_element(const amalgact::GroupSpec& G, prop::Rng& rng, std::int64_t radius = 20) {
  using amalgact::GroupKind;
  switch (G.kind()) {
    case GroupKind::FiniteTable:
      return G.element_at(rng.below(*G.order()));
    case GroupKind::FreeAbelian: {
      amalgact::IntVector v(G.rank());
      for (auto& x : v) x = rng.range(-radius, radius);
      return G.vector_element(std::move(v));
    }
    case GroupKind::DirectProduct: {
      std::vector<amalgact::Element> parts;
      for (const auto& c : G.components()) parts.push_back(random_element(c, rng, radius));
      return G.tuple(parts);
    }
  }
  return G.identity();
}

/// Finite preset groups, in library order.
inline std::vector<std::string> finite_groups() {
  std::vector<std::string> out;
  for (const auto& n : library().names()) {
    if (library().group(n).is_finite()) out.push_back(n);
  }
  return out;
}

}  // namespace fixtures
