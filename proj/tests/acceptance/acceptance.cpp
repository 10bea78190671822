// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "teamtab/cli.hpp"
#include "teamtab/error.hpp"
#include "teamtab/hilbert.hpp"
#include "teamtab/oracle.hpp"
#include "teamtab/parser.hpp"
#include "teamtab/semantics.hpp"
#include "teamtab/tableau.hpp"

using namespace teamtab;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

// Every team over {p,q}: the 16 subsets of the four assignments.
std::vector<PropTeam> all_pq_teams() {
  std::vector<PropTeam> out;
  const std::vector<std::vector<bool>> rows{{false, false}, {false, true}, {true, false}, {true, true}};
  for (unsigned mask = 0; mask < 16; ++mask) {
    PropTeam t({"p", "q"});
    for (unsigned i = 0; i < 4; ++i) {
      if (mask >> i & 1) t.insert_row(rows[i]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool subset_of(unsigned a, unsigned b) { return (a & ~b) == 0; }

// Shared bookkeeping for criterion 10.
struct RunLog {
  std::size_t runs = 0;
  std::size_t limit_hits = 0;
  std::size_t nondeterministic = 0;
  std::size_t bad_traces = 0;
  std::vector<std::string> examples;
};
RunLog runlog;

// Proves twice with traces on and compares the JSON byte for byte.
std::optional<Verdict> prove_logged(const Formula& phi) {
  ++runlog.runs;
  try {
    Verdict v = prove(phi);
    const std::string first = serialize_proof(v);
    const std::string second = serialize_proof(prove(phi));
    if (first != second) {
      ++runlog.nondeterministic;
      if (runlog.examples.size() < 3) runlog.examples.push_back("nondeterministic: " + print(phi));
    }
    const std::string trace = check_trace(v);
    if (!trace.empty()) {
      ++runlog.bad_traces;
      if (runlog.examples.size() < 3) runlog.examples.push_back("trace: " + print(phi) + ": " + trace);
    }
    return v;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ResourceLimit) throw;
    ++runlog.limit_hits;
    if (runlog.examples.size() < 3) runlog.examples.push_back("limit: " + print(phi));
    return std::nullopt;
  }
}

std::vector<Formula> modal_corpus() {
  std::mt19937_64 rng(testing::kCorpusSeed);
  std::vector<Formula> out;
  for (int i = 0; i < 1000; ++i) out.push_back(testing::random_modal(rng, static_cast<testing::ModalFamily>(i % 3)));
  return out;
}

// Random (model, team) pairs; the same seed everywhere keeps runs comparable.
std::vector<ModalCountermodel> model_corpus(std::size_t n, std::uint64_t salt) {
  std::mt19937_64 rng(testing::kCorpusSeed + salt);
  std::vector<ModalCountermodel> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::random_model(rng, 4, 4));
  return out;
}

// ---------------------------------------------------------------------------

void propositional_agreement(int id, const std::string& title, const std::vector<Formula>& corpus, bool disjunction) {
  const auto t0 = Clock::now();
  std::size_t mismatches = 0, valid = 0, unproved = 0;
  std::string example;
  std::unordered_map<Formula, bool> validity;
  for (const Formula& phi : corpus) {
    const bool truth = valid_prop(phi);
    validity.emplace(phi, truth);
    valid += truth;
    const auto v = prove_logged(phi);
    if (!v) {
      ++unproved;
      continue;
    }
    if (v->closed != truth) {
      if (mismatches++ == 0) example = " e.g. " + print(phi);
    }
    if (!v->closed) {
      if (!v->prop_countermodel || satisfies_prop(*v->prop_countermodel, phi)) ++mismatches;
    }
  }
  const double t = seconds_since(t0);
  std::ostringstream detail;
  detail << corpus.size() << " formulas, " << valid << " valid, " << mismatches << " mismatches, " << unproved
         << " unproved" << example << ", " << fmt(t);
  bool ok = mismatches == 0 && unproved == 0 && t < 600;

  if (disjunction) {
    std::size_t pairs = 0, violations = 0;
    for (const Formula& phi : corpus) {
      if (phi.kind() != Kind::IDis) continue;
      ++pairs;
      auto lookup = [&](const Formula& f) {
        const auto it = validity.find(f);
        return it != validity.end() ? it->second : valid_prop(f);
      };
      if (lookup(phi) != (lookup(phi.left()) || lookup(phi.right()))) ++violations;
    }
    detail << "; disjunction property on " << pairs << " pairs, " << violations << " violations";
    ok = ok && violations == 0;
  }
  report(id, title, ok, detail.str());
}

struct ModalRun {
  Formula phi;
  std::optional<Verdict> verdict;
};

void modal_criteria(const std::vector<Formula>& corpus) {
  const auto t0 = Clock::now();
  std::vector<ModalRun> runs;
  std::size_t open = 0, verify_failures = 0, unproved = 0;
  for (const Formula& phi : corpus) {
    auto v = prove_logged(phi);
    if (!v) {
      ++unproved;
    } else if (!v->closed) {
      ++open;
      const auto& cm = v->modal_countermodel;
      if (!cm || satisfies_modal(cm->model, cm->team, phi)) ++verify_failures;
    }
    runs.push_back({phi, std::move(v)});
  }
  std::ostringstream d3;
  d3 << corpus.size() << " formulas, " << open << " open, " << verify_failures << " countermodels failing verification, "
     << unproved << " unproved, " << fmt(seconds_since(t0));
  report(3, "Modal countermodel soundness", verify_failures == 0 && unproved == 0, d3.str());

  const auto t1 = Clock::now();
  std::size_t closed = 0, conflicts = 0, budget = 0;
  std::string example;
  for (const ModalRun& r : runs) {
    if (!r.verdict || !r.verdict->closed) continue;
    ++closed;
    try {
      if (search_modal_countermodel(r.phi, 3)) {
        if (conflicts++ == 0) example = " e.g. " + print(r.phi);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ResourceLimit) throw;
      ++budget;
    }
  }
  std::ostringstream d4;
  d4 << closed << " closed verdicts, " << conflicts << " conflicts with bounded search (<= 3 worlds), " << budget
     << " searches over budget" << example << ", " << fmt(seconds_since(t1));
  report(4, "Modal closed-verdict consistency", conflicts == 0 && budget == 0, d4.str());
}

void coherence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(testing::kCorpusSeed + 5);
  std::size_t failures_here = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto km = testing::random_model(rng, 4, 4);
    const Formula phi = testing::random_modal(rng, static_cast<testing::ModalFamily>(i % 3));
    if (!coherence_check(km.model, km.team, phi)) ++failures_here;
  }
  std::ostringstream d;
  d << "1000 random (K,T,phi) with |W| <= 4, |T| <= 4, " << failures_here << " failures, " << fmt(seconds_since(t0));
  report(5, "Coherence", failures_here == 0, d.str());
}

void translation(const std::vector<Formula>& pd, const std::vector<Formula>& plv, const std::vector<Formula>& modal) {
  const auto t0 = Clock::now();
  const auto teams = all_pq_teams();
  std::size_t pairs = 0, mismatches = 0, vr_changes = 0;
  for (const auto* corpus : {&pd, &plv}) {
    for (const Formula& phi : *corpus) {
      const Formula psi = eliminate_dep(phi);
      if (vr(psi) != vr(phi)) ++vr_changes;
      for (const PropTeam& t : teams) {
        ++pairs;
        if (satisfies_prop(t, phi) != satisfies_prop(t, psi)) ++mismatches;
      }
    }
  }
  const auto models = model_corpus(1000, 6);
  std::size_t modal_mismatches = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const Formula& phi = modal[i];
    const Formula psi = eliminate_dep(phi);
    if (vr(psi) != vr(phi)) ++vr_changes;
    if (satisfies_modal(models[i].model, models[i].team, phi) != satisfies_modal(models[i].model, models[i].team, psi)) {
      ++modal_mismatches;
    }
  }
  std::ostringstream d;
  d << pairs << " propositional (team, formula) pairs, " << mismatches << " mismatches; 1000 modal instances, "
    << modal_mismatches << " mismatches; " << vr_changes << " vr changes, " << fmt(seconds_since(t0));
  report(6, "Translation fidelity", mismatches == 0 && modal_mismatches == 0 && vr_changes == 0, d.str());
}

void downward_closure(const std::vector<Formula>& pd, const std::vector<Formula>& plv,
                      const std::vector<Formula>& modal) {
  const auto t0 = Clock::now();
  EvalOptions literal;
  literal.flat_shortcuts = false;
  const auto teams = all_pq_teams();
  std::size_t checks = 0, violations = 0, empty_violations = 0;
  for (const auto* corpus : {&pd, &plv}) {
    for (const Formula& phi : *corpus) {
      std::vector<bool> sat(16);
      for (unsigned m = 0; m < 16; ++m) sat[m] = satisfies_prop(teams[m], phi, literal);
      if (!sat[0]) ++empty_violations;
      for (unsigned big = 0; big < 16; ++big) {
        if (!sat[big]) continue;
        for (unsigned small = 0; small < 16; ++small) {
          if (!subset_of(small, big)) continue;
          ++checks;
          if (!sat[small]) ++violations;
        }
      }
    }
  }
  const auto models = model_corpus(1000, 7);
  for (std::size_t i = 0; i < 1000; ++i) {
    const Formula& phi = modal[i];
    ModelChecker mc(models[i].model, literal);
    if (!mc.satisfies({}, phi)) ++empty_violations;
    const std::vector<World> team(models[i].team.begin(), models[i].team.end());
    const unsigned n = static_cast<unsigned>(team.size());
    std::vector<bool> sat(1u << n);
    for (unsigned m = 0; m < (1u << n); ++m) {
      WorldTeam t;
      for (unsigned j = 0; j < n; ++j) {
        if (m >> j & 1) t.insert(team[j]);
      }
      sat[m] = mc.satisfies(t, phi);
    }
    for (unsigned big = 0; big < (1u << n); ++big) {
      if (!sat[big]) continue;
      for (unsigned small = 0; small < (1u << n); ++small) {
        if (!subset_of(small, big)) continue;
        ++checks;
        if (!sat[small]) ++violations;
      }
    }
  }
  std::ostringstream d;
  d << checks << " subteam checks, " << violations << " downward-closure violations, " << empty_violations
    << " empty-team violations, " << fmt(seconds_since(t0));
  report(7, "Downward closure and empty team", violations == 0 && empty_violations == 0, d.str());
}

void flatness(const std::vector<Formula>& pd) {
  const auto t0 = Clock::now();
  EvalOptions literal;
  literal.flat_shortcuts = false;
  const auto teams = all_pq_teams();
  std::size_t formulas = 0, checks = 0, violations = 0;
  for (const Formula& phi : pd) {
    if (!phi.is_flat()) continue;
    ++formulas;
    for (const PropTeam& t : teams) {
      ++checks;
      if (satisfies_prop(t, phi, literal) != pointwise_satisfies_prop(t, phi)) ++violations;
    }
  }
  std::mt19937_64 rng(testing::kCorpusSeed + 8);
  const auto models = model_corpus(1000, 9);
  for (std::size_t i = 0; i < 1000; ++i) {
    const Formula phi = testing::random_ml(rng, 2, 7);
    ++formulas;
    ++checks;
    ModelChecker mc(models[i].model, literal);
    if (mc.satisfies(models[i].team, phi) != pointwise_satisfies(models[i].model, models[i].team, phi)) ++violations;
  }
  std::ostringstream d;
  d << formulas << " dep-free, ||-free formulas, " << checks << " checks, " << violations << " violations, "
    << fmt(seconds_since(t0));
  report(8, "Flatness", violations == 0, d.str());
}

// Single-field mutants of a certificate.
std::vector<Certificate> mutants(const Certificate& c) {
  std::vector<Certificate> out;
  const Formula zz = Formula::atom("zz");
  auto with = [&](auto&& edit) {
    Certificate m = c;
    edit(m);
    out.push_back(std::move(m));
  };
  with([&](Certificate& m) { m.leaf = zz; });
  with([&](Certificate& m) { m.target = zz; });
  with([&](Certificate& m) {
    m.evidence = m.evidence == Evidence::PropOracle ? Evidence::Tableau : Evidence::PropOracle;
  });
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    const RuleApp& s = c.steps[i];
    with([&](Certificate& m) {
      auto& k = m.steps[i].kind;
      switch (k) {
        case StepKind::IDis1: k = StepKind::IDis2; break;
        case StepKind::IDis2: k = StepKind::IDis1; break;
        case StepKind::PLdep: k = StepKind::MLdep; break;
        case StepKind::MLdep: k = StepKind::PLdep; break;
      }
    });
    with([&](Certificate& m) { m.steps[i].position.push_back(0); });
    if (!s.position.empty()) with([&](Certificate& m) { m.steps[i].position.pop_back(); });
    if (s.other) with([&](Certificate& m) { m.steps[i].other = zz; });
    for (const auto& [key, value] : s.f) {
      with([&, key = key, value = value](Certificate& m) { m.steps[i].f[key] = !value; });
    }
  }
  return out;
}

// Intermediate formulas of a replay, or nullopt when a step does not apply.
std::optional<std::vector<Formula>> replay(const Certificate& c) {
  std::vector<Formula> seq{c.leaf};
  try {
    for (const RuleApp& s : c.steps) seq.push_back(apply_step(seq.back(), s));
  } catch (const Error&) {
    return std::nullopt;
  }
  return seq;
}

void certificates(const std::vector<Formula>& pd, const std::vector<Formula>& plv) {
  const auto t0 = Clock::now();
  std::size_t built = 0, wrong = 0, rejected_good = 0;
  std::size_t total_mutants = 0, equivalent = 0, caught = 0;
  std::string example;
  for (const auto* corpus : {&pd, &plv}) {
    for (const Formula& phi : *corpus) {
      const auto c = build_certificate(phi);
      if (c.has_value() != valid_prop(phi)) ++wrong;
      if (!c) continue;
      ++built;
      if (!check_certificate(*c).ok) ++rejected_good;
      const auto original = replay(*c);
      for (const Certificate& m : mutants(*c)) {
        if (m.target == c->target && m.leaf == c->leaf && m.evidence == c->evidence && replay(m) == original) {
          ++equivalent;
          continue;
        }
        ++total_mutants;
        if (!check_certificate(m).ok) {
          ++caught;
        } else if (example.empty()) {
          example = " e.g. mutant of " + print(phi) + " accepted";
        }
      }
    }
  }
  std::ostringstream d;
  d << built << " certificates, " << wrong << " formulas where success != validity, " << rejected_good
    << " built certificates rejected; " << caught << "/" << total_mutants << " mutants rejected (" << equivalent
    << " equivalent mutants excluded)" << example << ", " << fmt(seconds_since(t0));
  report(9, "Certificates", wrong == 0 && rejected_good == 0 && total_mutants >= 500 && caught == total_mutants,
         d.str());
}

void termination() {
  std::ostringstream d;
  d << runlog.runs << " prove runs (each repeated), " << runlog.limit_hits << " hit the node ceiling, "
    << runlog.nondeterministic << " differ between runs, " << runlog.bad_traces << " traces fail replay";
  for (const auto& e : runlog.examples) d << "; " << e;
  report(10, "Termination and determinism",
         runlog.limit_hits == 0 && runlog.nondeterministic == 0 && runlog.bad_traces == 0, d.str());
}

void pins() {
  struct Pin {
    const char* formula;
    bool valid;
  };
  const Pin list[] = {{"p | ~p", true}, {"p || ~p", false}, {"=(p,p)", true},
                      {"=(q)", false},  {"<>p", false},     {"[](p | ~p)", true}};
  std::size_t exact = 0;
  std::ostringstream d;
  for (const Pin& pin : list) {
    const Verdict v = prove(parse(pin.formula));
    std::ostringstream out, err;
    const int code = cli::run({"valid", pin.formula}, out, err);
    const std::string first = out.str().substr(0, out.str().find('\n'));
    bool ok = v.closed == pin.valid && first == (pin.valid ? "VALID" : "NOT VALID") && code == (pin.valid ? 0 : 1);
    if (std::string(pin.formula) == "<>p") {
      ok = ok && v.modal_countermodel && v.modal_countermodel->model.edge_count() == 0;
    }
    exact += ok;
    d << pin.formula << " -> " << first << (ok ? "" : " (wrong)") << "; ";
  }
  d << exact << "/6 exact";
  report(11, "Regression pins", exact == 6, d.str());
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const auto pd = testing::exhaustive_pd(7);
  const auto plv = testing::exhaustive_plv(7);
  const auto modal = modal_corpus();

  propositional_agreement(1, "Propositional exhaustive agreement (PD, size <= 7)", pd, false);
  propositional_agreement(2, "PL(||) agreement (size <= 7)", plv, true);
  modal_criteria(modal);
  coherence();
  translation(pd, plv, modal);
  downward_closure(pd, plv, modal);
  flatness(pd);
  certificates(pd, plv);
  termination();
  pins();

  std::printf("%d of 11 criteria failed, total %s\n", failures, fmt(seconds_since(start)).c_str());
  return failures == 0 ? 0 : 1;
}
