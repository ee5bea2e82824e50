#pragma once

#include <json.hpp>

#include "densfx/functional.hpp"
#include "densfx/mixture.hpp"

namespace densfx {

using nlohmann::json;

// {"a", "b", "p", "d"}
void to_json(json& j, const MixtureParams& params);
void from_json(const json& j, MixtureParams& params);

// {"kind": "shannon" | "renyi" | "quadratic" | "panter_dite", "alpha"?, "n"?, "q"?}
void to_json(json& j, const FunctionalSpec& spec);
void from_json(const json& j, FunctionalSpec& spec);

void to_json(json& j, const TruthEstimate& truth);

/// Reads a whole file into a JSON document; errors name the path.
json read_json_file(const std::string& path);
/// Writes `doc` with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const json& doc);

}  // namespace densfx
