#pragma once

// Labeled tableaux for PL, PL(⊻), PD, ML, ML(⊻), MDL and EMDL.
// A labeled formula α:φ reads "the team named by α falsifies φ".

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "teamtab/formula.hpp"
#include "teamtab/json_io.hpp"
#include "teamtab/semantics.hpp"

namespace teamtab {

/// Sorted, duplicate-free set of indices.
using Label = std::vector<std::uint32_t>;

struct LabeledFormula {
  Label label;
  Formula formula;
  friend bool operator==(const LabeledFormula&, const LabeledFormula&) = default;
};

struct AccessFact {
  std::uint32_t source;
  std::uint32_t target;
  friend bool operator==(const AccessFact&, const AccessFact&) = default;
};

using Entry = std::variant<LabeledFormula, AccessFact>;

struct LabeledFormulaHash {
  std::size_t operator()(const LabeledFormula& lf) const noexcept;
};

enum class Rule : std::uint8_t { Prop, NegProp, And, Or, IDis, Split, PLdep, Diamond, Box, MLdep };
std::string_view to_string(Rule rule);

/// What one child branch gains.
struct Alternative {
  std::vector<LabeledFormula> formulas;
  std::vector<AccessFact> facts;
  friend bool operator==(const Alternative&, const Alternative&) = default;
};

/// params: β for Or, the chosen successors (aligned with the principal's
/// label) for Diamond, the fresh index block for Box; empty otherwise.
struct RuleInstance {
  Rule rule;
  LabeledFormula principal;
  std::vector<std::uint32_t> params;
  std::vector<Alternative> alternatives;
  friend bool operator==(const RuleInstance&, const RuleInstance&) = default;
};

enum class ClosureReason : std::uint8_t { Clash, EmptyLabel, SingletonDep };
std::string_view to_string(ClosureReason reason);

struct Closure {
  ClosureReason reason;
  std::vector<LabeledFormula> entries;
};

/// A tableau branch. Entries are kept in insertion order; duplicates are
/// never added. Mutation is undoable back to a mark().
class Branch {
 public:
  explicit Branch(LabeledFormula root);

  const LabeledFormula& root() const;
  const std::vector<Entry>& entries() const { return entries_; }
  bool contains(const LabeledFormula& lf) const { return formulas_.contains(lf); }
  /// Index into entries(); the entry must be present.
  std::size_t position(const LabeledFormula& lf) const { return formulas_.at(lf); }
  std::size_t position(const AccessFact& fact) const;
  /// Some γ:φ with γ ⊆ lf.label is on the branch. By downward closure a team
  /// falsifying φ makes every superteam falsify it, so lf adds nothing new.
  bool subsumed(const LabeledFormula& lf) const;
  bool contains(const AccessFact& fact) const;
  /// Targets of facts i R j on the branch, in insertion order.
  const std::vector<std::uint32_t>& successors(std::uint32_t i) const;
  bool box_applied(const LabeledFormula& lf) const { return boxed_.contains(lf); }
  /// Principals (Box) has been applied to, in order.
  const std::vector<LabeledFormula>& boxed() const { return boxed_order_; }
  /// Index(B), ascending.
  std::vector<std::uint32_t> indices() const;
  std::uint32_t max_index() const { return max_index_; }
  /// The first closing configuration seen while adding entries, if any.
  const std::optional<Closure>& closure() const { return closure_; }

  /// Returns false when already present.
  bool add(const LabeledFormula& lf);
  bool add(const AccessFact& fact);
  void mark_box_applied(const LabeledFormula& lf);

  std::size_t mark() const { return trail_.size(); }
  void rollback(std::size_t mark);

 private:
  struct Undo {
    enum Kind : std::uint8_t { Formula, Fact, Boxed, Closed } kind;
    std::uint32_t previous_max = 0;
  };
  void note_index(std::uint32_t i);
  void check_closure(const LabeledFormula& lf);

  std::vector<Entry> entries_;
  std::unordered_map<LabeledFormula, std::size_t, LabeledFormulaHash> formulas_;
  std::unordered_map<std::uint64_t, std::size_t> facts_;
  std::unordered_map<Formula, std::vector<Label>> labels_of_;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> successors_;
  std::unordered_set<LabeledFormula, LabeledFormulaHash> boxed_;
  std::vector<LabeledFormula> boxed_order_;
  std::optional<Closure> closure_;
  std::uint32_t max_index_ = 0;
  std::vector<Undo> trail_;
};

struct ProveOptions {
  std::uint64_t node_limit = 2'000'000;
  /// Largest admissible root label.
  std::uint32_t label_cap = 64;
  /// Box alternatives: only non-decreasing predecessor maps f. The fresh
  /// indices are interchangeable, so the other maps give isomorphic branches.
  bool box_symmetry = true;
  bool record_trace = true;
};

/// {1..m}:φ with m = min(2^vr, 2^|props|) for propositional φ and 2^vr otherwise.
LabeledFormula root_for(const Formula& phi, std::uint32_t label_cap = ProveOptions{}.label_cap);

/// Recomputes the closure conditions from scratch.
std::optional<Closure> is_closed(const Branch& b);

/// Every instance applicable to b that is not already satisfied (some
/// alternative fully present). Box instances take fresh indices starting at
/// next_fresh (default: one past the largest index on b).
std::vector<RuleInstance> enumerate_instances(const Branch& b, std::optional<std::uint32_t> next_fresh = {},
                                              bool box_symmetry = true);

/// One child per alternative. Throws NotApplicable unless r is currently enumerable.
std::vector<Branch> apply_instance(const Branch& b, const RuleInstance& r, bool box_symmetry = true);

/// Throws NotSaturated unless no instance applies, InternalError if the
/// team fails to falsify the root.
PropTeam extract_prop_countermodel(const Branch& b);
ModalCountermodel extract_modal_countermodel(const Branch& b);

struct TraceStep {
  std::uint64_t branch;
  RuleInstance instance;
  /// One id per alternative; equal to `branch` for non-branching steps.
  std::vector<std::uint64_t> children;
};

struct ClosureEvent {
  std::uint64_t branch;
  Closure closure;
};

/// `branch` closes by the recorded proof of its sibling `source`, replayed
/// on `branch` (the two carry the same formulas and that proof reads none of
/// the facts in which they differ).
struct ReuseEvent {
  std::uint64_t branch;
  std::uint64_t source;
};

using TraceEvent = std::variant<TraceStep, ClosureEvent, ReuseEvent>;

struct ProofStats {
  std::uint64_t nodes = 0;
  std::uint64_t branches = 1;
  std::uint64_t closed_branches = 0;
  std::uint64_t max_depth = 0;
};

struct Verdict {
  Formula formula;
  LabeledFormula root;
  bool closed = false;
  std::vector<TraceEvent> trace;
  ProofStats stats;
  /// Set for open verdicts; exactly one countermodel kind matches the input.
  std::optional<Branch> open_branch;
  std::optional<PropTeam> prop_countermodel;
  std::optional<ModalCountermodel> modal_countermodel;
};

/// Depth-first saturation from root_for(φ). Throws ResourceLimit (with
/// partial statistics in the message) when the node budget runs out.
Verdict prove(const Formula& phi, const ProveOptions& options = {});

/// Replays a recorded trace from the root: principals must be present,
/// alternatives must match the rule, and for closed verdicts every leaf must
/// carry a valid closure. Returns an empty string on success.
std::string check_trace(const Verdict& v, bool box_symmetry = true);

Json to_json(const LabeledFormula& lf);
Json proof_to_json(const Verdict& v);
/// Deterministic JSON text ("teamtab-proof/1").
std::string serialize_proof(const Verdict& v);

}  // namespace teamtab
