#pragma once

#include <string>

#include "json.hpp"

#include "amalgact/bass_serre.hpp"
#include "amalgact/folner.hpp"
#include "amalgact/generic.hpp"

namespace amalgact {

using Json = nlohmann::ordered_json;

/// Rationals travel as "p/q" strings.
Json to_json(const Rational& r);
Rational rational_from_json(const Json& j, const std::string& key);

Json to_json(const GroupSpec& G, const FolnerReport& r);
Json to_json(const GroupSpec& G, const MatchResult& m);
Json to_json(const GroupSpec& G, const GroupMatch& m);
Json to_json(const GroupSpec& G, const PrescribedTerm& t);
Json to_json(const AprimeWitness& w, const AprimeReport& r);
Json to_json(const GroupSpec& G, const HypothesisReport& r);
Json to_json(const GroupSpec& H, const QuotientGraph& g);
Json to_json(const DoubleSpec& d, const CircuitWitness& c);

/// {"blocks": [[base, p1, p2, ...], ...], "forward": [[base, image], ...], "backward": [...]}.
/// Every block touched by either table is listed, base first, in A's canonical order.
Json to_json(const PartialPermutation& sigma);
PartialPermutation sigma_from_json(const Json& j, const ABlockSpace& blocks);

Json to_json(const AmalgamSpec& spec, const Certificate& cert);
Certificate certificate_from_json(const Json& j, const AmalgamSpec& spec);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

}  // namespace amalgact
