#include "teamtab/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "teamtab/error.hpp"
#include "teamtab/hilbert.hpp"
#include "teamtab/json_io.hpp"
#include "teamtab/oracle.hpp"
#include "teamtab/parser.hpp"
#include "teamtab/tableau.hpp"

namespace teamtab::cli {

namespace {

struct Globals {
  std::string logic = "auto";
  std::uint64_t limit_nodes = ProveOptions{}.node_limit;
  std::uint64_t seed = 0;
  bool json = false;
  std::string file;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  Globals globals;
  std::string formula_text;

  std::ostringstream& out() { return buffer_; }
  void flush() { out_ << buffer_.str() << std::flush; }
  std::ostream& err() { return err_; }

  std::string source() {
    if (!globals.file.empty()) {
      if (!formula_text.empty()) throw Error(ErrorCode::InvalidInput, "give either FORMULA or --file, not both");
      std::string text = read_file(globals.file);
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
      return text;
    }
    if (formula_text.empty()) throw Error(ErrorCode::InvalidInput, "missing FORMULA (or --file)");
    return formula_text;
  }

  // Parses the formula and enforces --logic.
  Formula formula(bool nnf = false) {
    text_ = source();
    Formula phi = nnf ? nnf_import(text_) : parse(text_);
    const LogicId actual = classify(phi);
    if (globals.logic != "auto") {
      const auto wanted = logic_from_string(globals.logic);
      if (!wanted) throw Error(ErrorCode::InvalidInput, "unknown logic '" + globals.logic + "'");
      if (!includes(*wanted, actual)) {
        throw Error(ErrorCode::WrongLogic, "formula is in " + std::string(to_string(actual)) + ", outside " +
                                               std::string(to_string(*wanted)));
      }
    }
    return phi;
  }

  ProveOptions prove_options() const {
    ProveOptions o;
    o.node_limit = globals.limit_nodes;
    return o;
  }

  const std::string& text() const { return text_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::ostringstream buffer_;
  std::string text_;
};

Json ast_json(const Formula& phi) {
  Json j;
  switch (phi.kind()) {
    case Kind::Atom: j["kind"] = "Atom"; j["name"] = phi.name(); return j;
    case Kind::NegAtom: j["kind"] = "NegAtom"; j["name"] = phi.name(); return j;
    case Kind::And: j["kind"] = "And"; break;
    case Kind::Or: j["kind"] = "Or"; break;
    case Kind::IDis: j["kind"] = "IDis"; break;
    case Kind::Diamond: j["kind"] = "Diamond"; break;
    case Kind::Box: j["kind"] = "Box"; break;
    case Kind::Dep: {
      j["kind"] = "Dep";
      Json args = Json::array();
      for (const Formula& a : phi.antecedents()) args.push_back(ast_json(a));
      j["antecedents"] = std::move(args);
      j["consequent"] = ast_json(phi.consequent());
      return j;
    }
  }
  Json children = Json::array();
  for (const Formula& c : phi.children()) children.push_back(ast_json(c));
  j["children"] = std::move(children);
  return j;
}

void print_ast(std::ostream& os, const Formula& phi, int depth) {
  os << std::string(2 * depth, ' ');
  switch (phi.kind()) {
    case Kind::Atom: os << "Atom " << phi.name() << '\n'; return;
    case Kind::NegAtom: os << "NegAtom " << phi.name() << '\n'; return;
    case Kind::And: os << "And\n"; break;
    case Kind::Or: os << "Or\n"; break;
    case Kind::IDis: os << "IDis\n"; break;
    case Kind::Diamond: os << "Diamond\n"; break;
    case Kind::Box: os << "Box\n"; break;
    case Kind::Dep: os << "Dep (" << phi.antecedents().size() << " antecedents)\n"; break;
  }
  for (const Formula& c : phi.children()) print_ast(os, c, depth + 1);
}

std::uint64_t root_size(const LabeledFormula& root) { return root.label.size(); }

// ---------------------------------------------------------------------------
// Subcommands

int cmd_parse(Runner& r, bool nnf) {
  const Formula phi = r.formula(nnf);
  if (r.globals.json) {
    Json j;
    j["formula"] = print(phi);
    j["logic"] = to_string(classify(phi));
    j["size"] = size(phi);
    j["vr"] = vr(phi);
    j["modal_depth"] = modal_depth(phi);
    j["ast"] = ast_json(phi);
    r.out() << j.dump(2) << '\n';
  } else {
    r.out() << print(phi) << '\n'
            << "logic: " << to_string(classify(phi)) << "  size: " << size(phi) << "  vr: " << vr(phi)
            << "  modal depth: " << modal_depth(phi) << '\n';
    print_ast(r.out(), phi, 0);
  }
  return kOk;
}

int cmd_check(Runner& r, const std::string& team_file, const std::string& model_file) {
  if (team_file.empty() == model_file.empty()) {
    throw Error(ErrorCode::InvalidInput, "check needs exactly one of --team or --model");
  }
  const Formula phi = r.formula();
  bool sat = false;
  if (!team_file.empty()) {
    const PropTeam team = prop_team_from_json(parse_json(read_file(team_file)));
    sat = satisfies_prop(team, phi);
  } else {
    const ModalCountermodel m = model_from_json(parse_json(read_file(model_file)));
    sat = satisfies_modal(m.model, m.team, phi);
  }
  if (r.globals.json) {
    r.out() << Json{{"formula", print(phi)}, {"satisfied", sat}}.dump(2) << '\n';
  } else {
    r.out() << (sat ? "satisfied" : "unsatisfied") << '\n';
  }
  return sat ? kOk : kNegative;
}

Json countermodel_json(const Verdict& v) {
  if (v.prop_countermodel) return to_json(*v.prop_countermodel);
  if (v.modal_countermodel) return to_json(*v.modal_countermodel);
  return nullptr;
}

int cmd_valid(Runner& r, const std::string& trace_file) {
  const Formula phi = r.formula();
  ProveOptions options = r.prove_options();
  options.record_trace = !trace_file.empty();
  const Verdict v = prove(phi, options);
  if (!trace_file.empty()) {
    std::ofstream out(trace_file, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + trace_file + "'");
    out << serialize_proof(v) << '\n';
  }
  if (r.globals.json) {
    Json j;
    j["formula"] = print(phi);
    j["logic"] = to_string(classify(phi));
    j["verdict"] = v.closed ? "VALID" : "NOT VALID";
    j["root"] = v.root.label;
    j["nodes"] = v.stats.nodes;
    if (!v.closed) j["countermodel"] = countermodel_json(v);
    r.out() << j.dump(2) << '\n';
  } else if (v.closed) {
    r.out() << "VALID\n";
  } else {
    r.out() << "NOT VALID\n" << countermodel_json(v).dump(2) << '\n';
  }
  return v.closed ? kOk : kNegative;
}

int cmd_oracle(Runner& r, std::size_t max_worlds) {
  const Formula phi = r.formula();
  const bool modal = is_modal(classify(phi));
  Json j;
  j["formula"] = print(phi);
  int status = kOk;
  std::ostringstream text;
  if (!modal) {
    const bool valid = valid_prop(phi);
    j["verdict"] = valid ? "VALID" : "NOT VALID";
    text << (valid ? "VALID" : "NOT VALID") << " (full-team evaluation over {0,1}^D)\n";
    if (!valid) {
      const auto team = search_prop_countermodel(phi);
      j["countermodel"] = to_json(*team);
      text << "minimal falsifying team:\n" << to_json(*team).dump(2) << '\n';
      status = kNegative;
    }
  } else {
    const auto found = search_modal_countermodel(phi, max_worlds);
    j["max_worlds"] = max_worlds;
    j["bounded"] = true;
    j["note"] = "bounded search, not a validity proof";
    if (found) {
      j["verdict"] = "NOT VALID";
      j["countermodel"] = to_json(*found);
      text << "NOT VALID: countermodel with at most " << max_worlds << " worlds\n"
           << to_json(*found).dump(2) << '\n';
      status = kNegative;
    } else {
      j["verdict"] = "no countermodel found";
      text << "no countermodel with at most " << max_worlds << " worlds (bounded search, not a validity proof)\n";
    }
  }
  if (r.globals.json) {
    r.out() << j.dump(2) << '\n';
  } else {
    r.out() << text.str();
  }
  return status;
}

int cmd_translate(Runner& r, bool flatten) {
  const Formula phi = r.formula();
  const Formula psi = eliminate_dep(phi);
  Json j;
  j["formula"] = print(phi);
  j["translation"] = print(psi);
  std::ostringstream text;
  text << print(psi) << '\n';
  if (flatten) {
    Json parts = Json::array();
    for (const Selection& f : enumerate_selections(psi)) {
      const std::string s = print(apply_selection(psi, f));
      parts.push_back(s);
      text << "  " << s << '\n';
    }
    j["selections"] = std::move(parts);
  }
  if (r.globals.json) {
    r.out() << j.dump(2) << '\n';
  } else {
    r.out() << text.str();
  }
  return kOk;
}

int cmd_certify(Runner& r, const std::string& check_file) {
  if (!check_file.empty()) {
    const Certificate c = certificate_from_json(parse_json(read_file(check_file)));
    if (!r.formula_text.empty() || !r.globals.file.empty()) {
      const Formula phi = r.formula();
      if (!(phi == c.target)) throw Error(ErrorCode::InvalidInput, "certificate target differs from FORMULA");
    }
    const CheckResult res = check_certificate(c, r.prove_options());
    if (r.globals.json) {
      r.out() << Json{{"target", print(c.target)}, {"accepted", res.ok}, {"diagnostic", res.diagnostic}}.dump(2)
              << '\n';
    } else if (res.ok) {
      r.out() << "certificate accepted\n";
    } else {
      r.out() << "certificate rejected: " << res.diagnostic << '\n';
    }
    return res.ok ? kOk : kNegative;
  }
  const Formula phi = r.formula();
  const auto cert = build_certificate(phi, r.prove_options());
  if (!cert) {
    if (r.globals.json) {
      r.out() << Json{{"target", print(phi)}, {"verdict", "NOT VALID"}}.dump(2) << '\n';
    } else {
      r.out() << "NOT VALID: no selection yields a valid leaf\n";
    }
    return kNegative;
  }
  r.out() << to_json(*cert).dump(2) << '\n';
  return kOk;
}

int cmd_vr(Runner& r) {
  const Formula phi = r.formula();
  const std::uint64_t v = vr(phi);
  const LabeledFormula root = root_for(phi);
  if (r.globals.json) {
    r.out() << Json{{"formula", print(phi)}, {"vr", v}, {"root_size", root_size(root)}}.dump(2) << '\n';
  } else {
    r.out() << "vr: " << v << "\nroot label size: " << root_size(root) << '\n';
  }
  return kOk;
}

void report(std::ostream& err, const std::string& source, const Error& e) {
  err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    const SourceSpan s = pe->span();
    err << "  " << source << '\n'
        << "  " << std::string(s.begin, ' ') << std::string(std::max<std::size_t>(s.end - s.begin, 1), '^') << '\n';
  }
}

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ResourceLimit: return kResource;
    case ErrorCode::Internal: return kInternal;
    default: return kInputError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner r(out, err);
  CLI::App app{"Validity prover and model checker for propositional and modal dependence logics", "teamtab"};
  app.require_subcommand(1);
  app.add_option("--logic", r.globals.logic, "auto|pl|plv|pd|ml|mlv|mdl|emdl")
      ->check(CLI::IsMember({"auto", "pl", "plv", "pd", "ml", "mlv", "mdl", "emdl"}));
  app.add_option("--limit-nodes", r.globals.limit_nodes, "tableau node budget");
  app.add_option("--seed", r.globals.seed, "reserved for corpus generation; no semantic effect");
  app.add_flag("--json", r.globals.json, "machine-readable output");
  app.add_option("--file", r.globals.file, "read FORMULA from a file");

  int status = kOk;
  auto formula_arg = [&](CLI::App* sub) { sub->add_option("FORMULA", r.formula_text, "formula text"); };

  bool nnf = false;
  auto* parse_cmd = app.add_subcommand("parse", "parse and pretty-print a formula");
  formula_arg(parse_cmd);
  parse_cmd->add_flag("--nnf", nnf, "accept '~' before any PL/ML subformula");
  parse_cmd->callback([&] { status = cmd_parse(r, nnf); });

  std::string team_file, model_file;
  auto* check_cmd = app.add_subcommand("check", "evaluate a formula on a team or Kripke model");
  check_cmd->add_option("--team", team_file, "propositional team JSON");
  check_cmd->add_option("--model", model_file, "Kripke model JSON");
  formula_arg(check_cmd);
  check_cmd->callback([&] { status = cmd_check(r, team_file, model_file); });

  std::string trace_file;
  auto* valid_cmd = app.add_subcommand("valid", "decide validity with the tableau");
  formula_arg(valid_cmd);
  valid_cmd->add_option("--trace", trace_file, "write the proof JSON here");
  valid_cmd->callback([&] { status = cmd_valid(r, trace_file); });

  std::size_t max_worlds = 3;
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force oracle (bounded for modal input)");
  formula_arg(oracle_cmd);
  oracle_cmd->add_option("--max-worlds", max_worlds, "world bound for modal search")->check(CLI::Range(1, 4));
  oracle_cmd->callback([&] { status = cmd_oracle(r, max_worlds); });

  bool flatten = false;
  auto* translate_cmd = app.add_subcommand("translate", "eliminate dependence atoms");
  formula_arg(translate_cmd);
  translate_cmd->add_flag("--flatten", flatten, "also list every selection instance");
  translate_cmd->callback([&] { status = cmd_translate(r, flatten); });

  std::string check_file;
  auto* certify_cmd = app.add_subcommand("certify", "build or check a Hilbert-style certificate");
  formula_arg(certify_cmd);
  certify_cmd->add_option("--check", check_file, "certificate JSON to verify");
  certify_cmd->callback([&] { status = cmd_certify(r, check_file); });

  auto* vr_cmd = app.add_subcommand("vr", "print vr and the root label size");
  formula_arg(vr_cmd);
  vr_cmd->callback([&] { status = cmd_vr(r); });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    report(err, r.text().empty() ? r.formula_text : r.text(), e);
    return status_of(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  r.flush();
  return status;
}

}  // namespace teamtab::cli
