#include "teamtab/json_io.hpp"

#include <algorithm>
#include <set>

#include "teamtab/error.hpp"

namespace teamtab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

void only_keys(const Json& j, std::initializer_list<std::string_view> keys, std::string_view what) {
  if (!j.is_object()) bad(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      bad("unknown key '" + key + "' in " + std::string(what));
    }
  }
  for (std::string_view k : keys) {
    if (!j.contains(std::string(k))) bad("missing key '" + std::string(k) + "' in " + std::string(what));
  }
}

std::vector<std::string> string_list(const Json& j, std::string_view what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) bad(std::string(what) + " must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

bool bit(const Json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) {
    const auto n = v.get<long long>();
    if (n == 0 || n == 1) return n == 1;
  }
  bad("assignment values must be 0/1 or true/false");
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

PropTeam prop_team_from_json(const Json& j) {
  only_keys(j, {"domain", "assignments"}, "team");
  PropTeam team(string_list(j["domain"], "domain"));
  if (!j["assignments"].is_array()) bad("assignments must be an array");
  for (const auto& row : j["assignments"]) {
    if (!row.is_object()) bad("each assignment must be an object");
    Assignment s;
    for (const auto& [prop, value] : row.items()) s[prop] = bit(value);
    team.insert(s);
  }
  return team;
}

Json to_json(const PropTeam& team) {
  Json out;
  out["domain"] = team.domain();
  Json rows = Json::array();
  for (const auto& row : team.rows()) {
    Json r = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[team.domain()[i]] = row[i] ? 1 : 0;
    rows.push_back(std::move(r));
  }
  out["assignments"] = std::move(rows);
  return out;
}

ModalCountermodel model_from_json(const Json& j) {
  only_keys(j, {"worlds", "relation", "valuation", "team"}, "model");
  KripkeModel model(string_list(j["worlds"], "worlds"));
  if (!j["relation"].is_array()) bad("relation must be an array of pairs");
  for (const auto& edge : j["relation"]) {
    const auto pair = string_list(edge, "relation pair");
    if (pair.size() != 2) bad("relation entries must be [source, target] pairs");
    model.add_edge(model.index_of(pair[0]), model.index_of(pair[1]));
  }
  if (!j["valuation"].is_object()) bad("valuation must be an object");
  for (const auto& [prop, worlds] : j["valuation"].items()) {
    model.declare(prop);
    for (const auto& w : string_list(worlds, "valuation entry")) model.set_true(prop, model.index_of(w));
  }
  WorldTeam team;
  for (const auto& w : string_list(j["team"], "team")) team.insert(model.index_of(w));
  return {std::move(model), std::move(team)};
}

Json to_json(const ModalCountermodel& m) {
  Json out;
  out["worlds"] = m.model.names();
  Json relation = Json::array();
  for (World w = 0; w < m.model.size(); ++w) {
    for (World v : m.model.successors(w)) relation.push_back({m.model.name(w), m.model.name(v)});
  }
  out["relation"] = std::move(relation);
  Json valuation = Json::object();
  for (const auto& [prop, worlds] : m.model.valuation()) {
    Json list = Json::array();
    for (World w : worlds) list.push_back(m.model.name(w));
    valuation[prop] = std::move(list);
  }
  out["valuation"] = std::move(valuation);
  Json team = Json::array();
  for (World w : m.team) team.push_back(m.model.name(w));
  out["team"] = std::move(team);
  return out;
}

}  // namespace teamtab
