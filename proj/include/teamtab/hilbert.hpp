#pragma once

// Certificates for the Hilbert-style extensions of PL and ML by the rules
// (I⊻1), (I⊻2), (PL dep f) and (ML dep f). A certificate is a base leaf whose
// validity is re-established by an oracle, plus rule applications that turn
// the leaf into the target.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamtab/formula.hpp"
#include "teamtab/json_io.hpp"
#include "teamtab/tableau.hpp"

namespace teamtab {

enum class StepKind : std::uint8_t { IDis1, IDis2, PLdep, MLdep };
std::string_view to_string(StepKind kind);

/// f : {⊤,⊥}^n → {⊤,⊥}, true standing for ⊤.
using AgreementMap = std::map<std::vector<bool>, bool>;

struct RuleApp {
  StepKind kind;
  Path position;
  /// The introduced disjunct, for IDis steps.
  std::optional<Formula> other;
  /// The dependence atom and f, for dep steps.
  std::optional<Formula> dep;
  AgreementMap f;
  friend bool operator==(const RuleApp&, const RuleApp&) = default;
};

enum class Evidence : std::uint8_t { PropOracle, Tableau };

struct Certificate {
  Formula target;
  Formula leaf;
  Evidence evidence;
  std::vector<RuleApp> steps;
  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// φ(ψ/*) ⟹ φ((ψ ⊻ other)/*) for side 1, φ((other ⊻ ψ)/*) for side 2.
Formula apply_idis_step(const Formula& phi, const Path& position, int side, const Formula& other);

/// ⋁_ā ⋀{a1^ā1, ..., an^ān, ψ^f(ā)}: the premise shape for dep and f.
Formula dep_premise(const Formula& dep, const AgreementMap& f);

/// Replaces the premise at `position` by the dependence atom. Throws
/// ShapeMismatch unless the subformula is exactly dep_premise(dep, f), and
/// WrongLogic when the arguments do not suit the rule family.
Formula apply_dep_step(const Formula& phi, const Path& position, const Formula& dep, const AgreementMap& f,
                       StepKind kind = StepKind::PLdep);

Formula apply_step(const Formula& phi, const RuleApp& step);

/// nullopt when no selection yields a valid leaf, i.e. φ is not valid.
/// Modal leaves are discharged by the tableau with the given options.
std::optional<Certificate> build_certificate(const Formula& phi, const ProveOptions& options = {});

struct CheckResult {
  bool ok;
  std::string diagnostic;
};

/// Re-runs the leaf evidence and replays the steps. Never throws on bad
/// certificates; failures come back with a diagnostic.
CheckResult check_certificate(const Certificate& c, const ProveOptions& options = {});

Json to_json(const Certificate& c);
/// Throws Error(InvalidInput) on malformed documents and ParseError on bad formulas.
Certificate certificate_from_json(const Json& j);

}  // namespace teamtab
