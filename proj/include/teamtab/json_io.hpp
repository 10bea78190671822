#pragma once

// File formats for propositional teams and Kripke structures.
//
//   team:  {"domain":["p","q"],"assignments":[{"p":1,"q":0}, ...]}
//   model: {"worlds":["w0",...],"relation":[["w0","w1"], ...],
//           "valuation":{"p":["w0"]},"team":["w0", ...]}
//
// Unknown keys are rejected with Error(InvalidInput).

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "teamtab/semantics.hpp"

namespace teamtab {

using Json = nlohmann::ordered_json;

PropTeam prop_team_from_json(const Json& j);
Json to_json(const PropTeam& team);

ModalCountermodel model_from_json(const Json& j);
Json to_json(const ModalCountermodel& m);

/// Parses text, mapping syntax errors to Error(InvalidInput).
Json parse_json(std::string_view text);

}  // namespace teamtab
