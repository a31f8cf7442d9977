#pragma once

#include <string>

#include <json.hpp>

#include "capdrum/bounds.hpp"
#include "capdrum/capacity.hpp"
#include "capdrum/capradius.hpp"
#include "capdrum/constants.hpp"
#include "capdrum/geometry.hpp"
#include "capdrum/spectrum.hpp"

namespace capdrum {

// Domain trees as JSON: {"op": "...", ...payload..., "args": [children]}.
// Ops: ball, box, half_space, full_space, empty, union, intersection,
// complement, translate, scale, periodic_array.  Payload keys: center,
// radius, min, max, normal, offset, shift, factor, lattice, counts.
nlohmann::json to_json(const DomainSpec& spec);

// Throws SpecParseError naming the offending node, e.g. "$.args[1].radius".
DomainSpec domain_from_json(const nlohmann::json& j);
DomainSpec parse_domain_text(const std::string& text);
DomainSpec load_domain_file(const std::string& path);

nlohmann::json to_json(const ExplicitConstants& c);
nlohmann::json to_json(const CapacityEstimate& e);
nlohmann::json to_json(const EigenResult& e);
nlohmann::json to_json(const TestFunctionReport& r);
nlohmann::json to_json(const NegligibilityVerdict& v);
nlohmann::json to_json(const RadiusResult& r);
nlohmann::json to_json(const BoundsReport& r);

// Canonical emission: keys sorted (nlohmann's default map order), two-space
// indent, trailing newline.  Nonfinite numbers are emitted as the strings
// "inf" / "-inf" by the report builders above.
std::string dump_json(const nlohmann::json& j);

}  // namespace capdrum
