// Structured JSON reports for sampler runs, verification suites, and
// potential condition checks, plus a plain-text digest renderer.  Keys keep
// insertion order, which is fixed by the construction code, so identical
// runs serialize byte-identically.
#pragma once

#include <json.hpp>
#include <string>

#include "gibbsdyn/gibbs.hpp"
#include "gibbsdyn/potentials.hpp"
#include "gibbsdyn/stats.hpp"

namespace gibbsdyn {

using Json = nlohmann::ordered_json;

Json to_json(const MCTestReport& rep);
Json to_json(const ConditionReport& rep);
Json to_json(const EnsembleDiagnostics& diag);

// Serialize with a trailing newline; parse throws nlohmann::json::exception.
std::string json_text(const Json& j);
Json parse_json(const std::string& text);

// Human-readable digest of any report produced by the runner (dispatches on
// the "command" field).
std::string render_digest(const Json& report);

}  // namespace gibbsdyn
