#include "teamtab/hilbert.hpp"

#include <algorithm>

#include "teamtab/error.hpp"
#include "teamtab/oracle.hpp"
#include "teamtab/parser.hpp"

namespace teamtab {

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::IDis1: return "idis1";
    case StepKind::IDis2: return "idis2";
    case StepKind::PLdep: return "pldep";
    case StepKind::MLdep: return "mldep";
  }
  return "?";
}

Formula apply_idis_step(const Formula& phi, const Path& position, int side, const Formula& other) {
  if (side != 1 && side != 2) throw Error(ErrorCode::InvalidInput, "side must be 1 or 2");
  const Formula& psi = subformula_at(phi, position);
  return replace_at(phi, position, side == 1 ? Formula::idis(psi, other) : Formula::idis(other, psi));
}

namespace {

bool all_atoms(const Formula& dep) {
  return std::all_of(dep.children().begin(), dep.children().end(),
                     [](const Formula& a) { return a.kind() == Kind::Atom; });
}

void check_agreement_map(const Formula& dep, const AgreementMap& f) {
  const auto tuples = truth_tuples(dep.antecedents().size());
  if (f.size() != tuples.size() ||
      !std::all_of(tuples.begin(), tuples.end(), [&](const auto& t) { return f.contains(t); })) {
    throw Error(ErrorCode::ShapeMismatch, "f must be defined on exactly the truth-value tuples of the dependence atom");
  }
}

}  // namespace

Formula dep_premise(const Formula& dep, const AgreementMap& f) {
  if (dep.kind() != Kind::Dep) throw Error(ErrorCode::ShapeMismatch, "not a dependence atom: " + print(dep));
  check_agreement_map(dep, f);
  const auto args = dep.antecedents();
  std::vector<Formula> disjuncts;
  for (const auto& tuple : truth_tuples(args.size())) {
    std::vector<Formula> conjuncts;
    for (std::size_t j = 0; j < args.size(); ++j) conjuncts.push_back(polarize(args[j], tuple[j]));
    conjuncts.push_back(polarize(dep.consequent(), f.at(tuple)));
    disjuncts.push_back(big_conj(conjuncts));
  }
  return big_disj(disjuncts);
}

Formula apply_dep_step(const Formula& phi, const Path& position, const Formula& dep, const AgreementMap& f,
                       StepKind kind) {
  if (kind != StepKind::PLdep && kind != StepKind::MLdep) {
    throw Error(ErrorCode::InvalidInput, "not a dependence rule");
  }
  if (dep.kind() != Kind::Dep) throw Error(ErrorCode::ShapeMismatch, "not a dependence atom: " + print(dep));
  if (kind == StepKind::PLdep && !all_atoms(dep)) {
    throw Error(ErrorCode::WrongLogic, "(PL dep f) needs proposition symbols as arguments");
  }
  if (dep.features() & detail::kBadDepArg) {
    throw Error(ErrorCode::WrongLogic, "(ML dep f) needs modal formulas as arguments");
  }
  const Formula& here = subformula_at(phi, position);
  if (!(here == dep_premise(dep, f))) {
    throw Error(ErrorCode::ShapeMismatch, "subformula is not the premise of " + print(dep) + " for this f");
  }
  return replace_at(phi, position, dep);
}

Formula apply_step(const Formula& phi, const RuleApp& step) {
  switch (step.kind) {
    case StepKind::IDis1:
    case StepKind::IDis2:
      if (!step.other) throw Error(ErrorCode::InvalidInput, "IDis step without a disjunct");
      return apply_idis_step(phi, step.position, step.kind == StepKind::IDis1 ? 1 : 2, *step.other);
    case StepKind::PLdep:
    case StepKind::MLdep:
      if (!step.dep) throw Error(ErrorCode::InvalidInput, "dep step without a dependence atom");
      return apply_dep_step(phi, step.position, *step.dep, step.f, step.kind);
  }
  throw Error(ErrorCode::InvalidInput, "unknown step kind");
}

namespace {

bool is_modal_formula(const Formula& phi) { return phi.features() & detail::kHasModal; }

// Validity of a ⊻- and dep-free leaf under the named evidence.
bool leaf_valid(const Formula& leaf, Evidence evidence, const ProveOptions& options) {
  if (evidence == Evidence::PropOracle) return valid_prop(leaf);
  ProveOptions quiet = options;
  quiet.record_trace = false;
  return prove(leaf, quiet).closed;
}

Evidence evidence_for(const Formula& phi) { return is_modal_formula(phi) ? Evidence::Tableau : Evidence::PropOracle; }

// Steps rebuilding φ from φ^g: descend into the selected side in place, then
// reintroduce the unselected side.
void idis_steps(const Formula& node, Path& phi_path, Path& current, const Selection& g, std::vector<RuleApp>& out) {
  if (node.kind() == Kind::IDis) {
    const Side side = g.choice.at(phi_path);
    const std::uint32_t keep = side == Side::Left ? 0 : 1;
    phi_path.push_back(keep);
    idis_steps(node.children()[keep], phi_path, current, g, out);
    phi_path.pop_back();
    out.push_back({side == Side::Left ? StepKind::IDis1 : StepKind::IDis2, current, node.children()[1 - keep],
                   std::nullopt, {}});
    return;
  }
  if (!(node.features() & detail::kHasIDis)) return;
  for (std::uint32_t i = 0; i < node.children().size(); ++i) {
    phi_path.push_back(i);
    current.push_back(i);
    idis_steps(node.children()[i], phi_path, current, g, out);
    current.pop_back();
    phi_path.pop_back();
  }
}

void dep_positions(const Formula& node, Path& path, std::vector<Path>& out) {
  if (node.kind() == Kind::Dep) {
    out.push_back(path);
    return;
  }
  if (!(node.features() & detail::kHasDep)) return;
  for (std::uint32_t i = 0; i < node.children().size(); ++i) {
    path.push_back(i);
    dep_positions(node.children()[i], path, out);
    path.pop_back();
  }
}

// Path, relative to a dep expansion, of the ⊻ in the disjunct for tuple k.
Path expansion_idis_path(std::size_t k, std::size_t tuples, std::size_t arity) {
  Path p(k, 1);
  if (k + 1 < tuples) p.push_back(0);
  p.insert(p.end(), arity, 1);
  return p;
}

std::optional<Certificate> certificate_with_deps(const Formula& phi, const ProveOptions& options) {
  const Formula psi = eliminate_dep(phi);
  std::vector<Path> deps;
  Path scratch;
  dep_positions(phi, scratch, deps);
  const StepKind kind = classify(phi) == LogicId::EMDL ? StepKind::MLdep : StepKind::PLdep;
  const Evidence evidence = evidence_for(phi);

  for (const Selection& g : enumerate_selections(psi)) {
    const Formula leaf = apply_selection(psi, g);
    if (!leaf_valid(leaf, evidence, options)) continue;
    Certificate cert{phi, leaf, evidence, {}};
    Formula expected = phi;
    for (const Path& at : deps) {
      const Formula& dep = subformula_at(phi, at);
      const auto tuples = truth_tuples(dep.antecedents().size());
      AgreementMap f;
      for (std::size_t k = 0; k < tuples.size(); ++k) {
        Path p = at;
        const Path rel = expansion_idis_path(k, tuples.size(), dep.antecedents().size());
        p.insert(p.end(), rel.begin(), rel.end());
        f[tuples[k]] = g.choice.at(p) == Side::Left;
      }
      expected = replace_at(expected, at, dep_premise(dep, f));
      cert.steps.push_back({kind, at, std::nullopt, dep, std::move(f)});
    }
    if (!(expected == leaf)) throw Error(ErrorCode::Internal, "dep selection does not match its premise shape");
    return cert;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Certificate> build_certificate(const Formula& phi, const ProveOptions& options) {
  classify(phi);
  if (phi.features() & detail::kHasDep) return certificate_with_deps(phi, options);
  const Evidence evidence = evidence_for(phi);
  for (const Selection& g : enumerate_selections(phi)) {
    const Formula leaf = apply_selection(phi, g);
    if (!leaf_valid(leaf, evidence, options)) continue;
    Certificate cert{phi, leaf, evidence, {}};
    Path phi_path, current;
    idis_steps(phi, phi_path, current, g, cert.steps);
    return cert;
  }
  return std::nullopt;
}

CheckResult check_certificate(const Certificate& c, const ProveOptions& options) {
  try {
    if (!c.leaf.is_flat()) return {false, "leaf must be free of '||' and dependence atoms"};
    if (c.evidence == Evidence::PropOracle && is_modal_formula(c.leaf)) {
      return {false, "prop-oracle evidence on a modal leaf"};
    }
    if (c.evidence != evidence_for(c.target)) return {false, "evidence kind does not match the target logic"};
    const LogicId logic = classify(c.target);
    Formula current = c.leaf;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      const RuleApp& step = c.steps[i];
      const bool dep_step = step.kind == StepKind::PLdep || step.kind == StepKind::MLdep;
      if (dep_step && (step.kind == StepKind::MLdep) != (logic == LogicId::EMDL)) {
        return {false, "step " + std::to_string(i) + ": " + std::string(to_string(step.kind)) +
                           " is not a rule of the calculus for " + std::string(to_string(logic))};
      }
      try {
        current = apply_step(current, step);
      } catch (const Error& e) {
        return {false, "step " + std::to_string(i) + ": " + e.what()};
      }
    }
    if (!(current == c.target)) return {false, "replay yields " + print(current) + ", not the target"};
    if (!leaf_valid(c.leaf, c.evidence, options)) return {false, "leaf " + print(c.leaf) + " is not valid"};
    return {true, {}};
  } catch (const Error& e) {
    return {false, e.what()};
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string tuple_key(const std::vector<bool>& t) {
  std::string key;
  for (bool b : t) key.push_back(b ? 'T' : 'F');
  return key;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, "certificate: " + what); }

void only_keys(const Json& j, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) bad("expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) bad("unknown key '" + key + "'");
  }
  for (std::string_view k : keys) {
    if (!j.contains(std::string(k))) bad("missing key '" + std::string(k) + "'");
  }
}

std::string text(const Json& j, const char* key) {
  if (!j.at(key).is_string()) bad(std::string(key) + " must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

Json to_json(const Certificate& c) {
  Json out;
  out["version"] = "teamtab-cert/1";
  out["target"] = print(c.target);
  out["leaf"] = print(c.leaf);
  out["evidence"] = c.evidence == Evidence::PropOracle ? "prop-oracle" : "tableau";
  Json steps = Json::array();
  for (const RuleApp& s : c.steps) {
    Json j;
    j["kind"] = to_string(s.kind);
    j["position"] = s.position;
    if (s.kind == StepKind::IDis1 || s.kind == StepKind::IDis2) {
      j["other"] = s.other ? print(*s.other) : "";
    } else {
      j["dep"] = s.dep ? print(*s.dep) : "";
      Json f = Json::object();
      for (const auto& [tuple, value] : s.f) f[tuple_key(tuple)] = value ? "T" : "F";
      j["f"] = std::move(f);
    }
    steps.push_back(std::move(j));
  }
  out["steps"] = std::move(steps);
  return out;
}

Certificate certificate_from_json(const Json& j) {
  only_keys(j, {"version", "target", "leaf", "evidence", "steps"});
  if (text(j, "version") != "teamtab-cert/1") bad("unsupported version");
  const std::string evidence = text(j, "evidence");
  if (evidence != "prop-oracle" && evidence != "tableau") bad("evidence must be prop-oracle or tableau");
  Certificate c{parse(text(j, "target")), parse(text(j, "leaf")),
                evidence == "prop-oracle" ? Evidence::PropOracle : Evidence::Tableau, {}};
  if (!j["steps"].is_array()) bad("steps must be an array");
  for (const auto& s : j["steps"]) {
    if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) bad("each step needs a kind");
    const std::string kind = s["kind"].get<std::string>();
    RuleApp step{StepKind::IDis1, {}, std::nullopt, std::nullopt, {}};
    if (kind == "idis1" || kind == "idis2") {
      only_keys(s, {"kind", "position", "other"});
      step.kind = kind == "idis1" ? StepKind::IDis1 : StepKind::IDis2;
      step.other = parse(text(s, "other"));
    } else if (kind == "pldep" || kind == "mldep") {
      only_keys(s, {"kind", "position", "dep", "f"});
      step.kind = kind == "pldep" ? StepKind::PLdep : StepKind::MLdep;
      step.dep = parse(text(s, "dep"));
      if (!s["f"].is_object()) bad("f must be an object");
      for (const auto& [key, value] : s["f"].items()) {
        std::vector<bool> tuple;
        for (char ch : key) {
          if (ch != 'T' && ch != 'F') bad("f keys are strings over T/F");
          tuple.push_back(ch == 'T');
        }
        if (!value.is_string() || (value != "T" && value != "F")) bad("f values are \"T\" or \"F\"");
        step.f[tuple] = value == "T";
      }
    } else {
      bad("unknown step kind '" + kind + "'");
    }
    if (!s["position"].is_array()) bad("position must be an array");
    for (const auto& p : s["position"]) {
      if (!p.is_number_unsigned()) bad("position steps are child indices");
      step.position.push_back(p.get<std::uint32_t>());
    }
    c.steps.push_back(std::move(step));
  }
  return c;
}

}  // namespace teamtab
