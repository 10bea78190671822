#include "teamtab/tableau.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <set>

#include "teamtab/error.hpp"
#include "teamtab/parser.hpp"

namespace teamtab {

std::size_t LabeledFormulaHash::operator()(const LabeledFormula& lf) const noexcept {
  std::size_t h = lf.formula.hash();
  for (std::uint32_t i : lf.label) h = h * 1000003u ^ (i + 0x9e3779b9u);
  return h;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::Prop: return "Prop";
    case Rule::NegProp: return "NegProp";
    case Rule::And: return "And";
    case Rule::Or: return "Or";
    case Rule::IDis: return "IDis";
    case Rule::Split: return "Split";
    case Rule::PLdep: return "PLdep";
    case Rule::Diamond: return "Diamond";
    case Rule::Box: return "Box";
    case Rule::MLdep: return "MLdep";
  }
  return "?";
}

std::string_view to_string(ClosureReason reason) {
  switch (reason) {
    case ClosureReason::Clash: return "clash";
    case ClosureReason::EmptyLabel: return "empty-label";
    case ClosureReason::SingletonDep: return "singleton-dep";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Branch

Branch::Branch(LabeledFormula root) { add(root); }

const LabeledFormula& Branch::root() const { return std::get<LabeledFormula>(entries_.front()); }

namespace {
std::uint64_t fact_key(const AccessFact& f) { return (std::uint64_t{f.source} << 32) | f.target; }
}  // namespace

bool Branch::contains(const AccessFact& fact) const { return facts_.contains(fact_key(fact)); }

std::size_t Branch::position(const AccessFact& fact) const { return facts_.at(fact_key(fact)); }

const std::vector<std::uint32_t>& Branch::successors(std::uint32_t i) const {
  static const std::vector<std::uint32_t> none;
  const auto it = successors_.find(i);
  return it == successors_.end() ? none : it->second;
}

std::vector<std::uint32_t> Branch::indices() const {
  std::vector<std::uint32_t> out;
  for (const Entry& e : entries_) {
    if (const auto* lf = std::get_if<LabeledFormula>(&e)) {
      out.insert(out.end(), lf->label.begin(), lf->label.end());
    } else {
      const auto& f = std::get<AccessFact>(e);
      out.push_back(f.source);
      out.push_back(f.target);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Branch::note_index(std::uint32_t i) { max_index_ = std::max(max_index_, i); }

void Branch::check_closure(const LabeledFormula& lf) {
  if (closure_) return;
  const auto& label = lf.label;
  const Formula& phi = lf.formula;
  if (label.empty()) {
    closure_ = Closure{ClosureReason::EmptyLabel, {lf}};
  } else if (label.size() == 1 && phi.kind() == Kind::Dep) {
    closure_ = Closure{ClosureReason::SingletonDep, {lf}};
  } else if (label.size() == 1 && phi.is_literal()) {
    const bool positive = phi.kind() == Kind::Atom;
    LabeledFormula other{label, positive ? Formula::neg_atom(phi.name()) : Formula::atom(phi.name())};
    if (contains(other)) {
      closure_ = positive ? Closure{ClosureReason::Clash, {lf, std::move(other)}}
                          : Closure{ClosureReason::Clash, {std::move(other), lf}};
    }
  }
  if (closure_) trail_.push_back({Undo::Closed});
}

bool Branch::add(const LabeledFormula& lf) {
  if (!std::is_sorted(lf.label.begin(), lf.label.end()) ||
      std::adjacent_find(lf.label.begin(), lf.label.end()) != lf.label.end()) {
    throw Error(ErrorCode::Internal, "label is not a sorted set");
  }
  if (formulas_.contains(lf)) return false;
  trail_.push_back({Undo::Formula, max_index_});
  formulas_.emplace(lf, entries_.size());
  labels_of_[lf.formula].push_back(lf.label);
  entries_.emplace_back(lf);
  for (std::uint32_t i : lf.label) note_index(i);
  check_closure(lf);
  return true;
}

bool Branch::subsumed(const LabeledFormula& lf) const {
  const auto it = labels_of_.find(lf.formula);
  if (it == labels_of_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const Label& gamma) {
    return std::includes(lf.label.begin(), lf.label.end(), gamma.begin(), gamma.end());
  });
}

bool Branch::add(const AccessFact& fact) {
  if (contains(fact)) return false;
  trail_.push_back({Undo::Fact, max_index_});
  successors_[fact.source].push_back(fact.target);
  facts_.emplace(fact_key(fact), entries_.size());
  entries_.emplace_back(fact);
  note_index(fact.source);
  note_index(fact.target);
  return true;
}

void Branch::mark_box_applied(const LabeledFormula& lf) {
  if (!boxed_.insert(lf).second) return;
  boxed_order_.push_back(lf);
  trail_.push_back({Undo::Boxed});
}

void Branch::rollback(std::size_t mark) {
  while (trail_.size() > mark) {
    const Undo u = trail_.back();
    trail_.pop_back();
    switch (u.kind) {
      case Undo::Formula: {
        const auto& lf = std::get<LabeledFormula>(entries_.back());
        auto it = labels_of_.find(lf.formula);
        it->second.pop_back();
        if (it->second.empty()) labels_of_.erase(it);
        formulas_.erase(lf);
        entries_.pop_back();
        max_index_ = u.previous_max;
        break;
      }
      case Undo::Fact: {
        const auto fact = std::get<AccessFact>(entries_.back());
        auto& succ = successors_[fact.source];
        succ.pop_back();
        if (succ.empty()) successors_.erase(fact.source);
        facts_.erase(fact_key(fact));
        entries_.pop_back();
        max_index_ = u.previous_max;
        break;
      }
      case Undo::Boxed:
        boxed_.erase(boxed_order_.back());
        boxed_order_.pop_back();
        break;
      case Undo::Closed: closure_.reset(); break;
    }
  }
}

std::optional<Closure> is_closed(const Branch& b) {
  for (const Entry& e : b.entries()) {
    const auto* lf = std::get_if<LabeledFormula>(&e);
    if (lf == nullptr) continue;
    if (lf->label.empty()) return Closure{ClosureReason::EmptyLabel, {*lf}};
    if (lf->label.size() == 1 && lf->formula.kind() == Kind::Dep) return Closure{ClosureReason::SingletonDep, {*lf}};
    if (lf->label.size() == 1 && lf->formula.kind() == Kind::Atom) {
      LabeledFormula neg{lf->label, Formula::neg_atom(lf->formula.name())};
      if (b.contains(neg)) return Closure{ClosureReason::Clash, {*lf, std::move(neg)}};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule instances

namespace {

Label subset(const Label& alpha, std::uint64_t bits) {
  Label out;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if ((bits >> j) & 1) out.push_back(alpha[j]);
  }
  return out;
}

Label as_label(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::uint64_t box_width(const Formula& inner, std::uint32_t cap) {
  const std::uint64_t v = vr(inner);
  if (v >= 32 || (std::uint64_t{1} << v) > cap) {
    throw Error(ErrorCode::ResourceLimit, "(Box) would need more than " + std::to_string(cap) + " fresh indices");
  }
  return std::uint64_t{1} << v;
}

// Instances whose shape depends only on the labeled formula itself.
std::vector<RuleInstance> static_instances(const LabeledFormula& lf) {
  std::vector<RuleInstance> out;
  const Label& alpha = lf.label;
  const Formula& phi = lf.formula;
  switch (phi.kind()) {
    case Kind::Atom:
    case Kind::NegAtom: {
      if (alpha.size() < 2) break;
      RuleInstance r{phi.kind() == Kind::Atom ? Rule::Prop : Rule::NegProp, lf, {}, {}};
      for (std::uint32_t i : alpha) r.alternatives.push_back({{{{i}, phi}}, {}});
      out.push_back(std::move(r));
      break;
    }
    case Kind::And:
      out.push_back({Rule::And, lf, {}, {{{{alpha, phi.left()}}, {}}, {{{alpha, phi.right()}}, {}}}});
      break;
    case Kind::Or:
      if (alpha.size() > 20) throw Error(ErrorCode::ResourceLimit, "(Or) on a label of more than 20 indices");
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << alpha.size()); ++bits) {
        Label beta = subset(alpha, bits);
        Label rest = subset(alpha, ~bits);
        out.push_back({Rule::Or, lf, beta, {{{{beta, phi.left()}}, {}}, {{{rest, phi.right()}}, {}}}});
      }
      break;
    case Kind::IDis:
      out.push_back({Rule::IDis, lf, {}, {{{{alpha, phi.left()}, {alpha, phi.right()}}, {}}}});
      break;
    case Kind::Dep: {
      if (alpha.size() >= 3) {
        RuleInstance r{Rule::Split, lf, {}, {}};
        for (std::size_t a = 0; a < alpha.size(); ++a) {
          for (std::size_t b = a + 1; b < alpha.size(); ++b) {
            r.alternatives.push_back({{{{alpha[a], alpha[b]}, phi}}, {}});
          }
        }
        out.push_back(std::move(r));
      } else if (alpha.size() == 2) {
        const auto args = phi.antecedents();
        const bool atomic = std::all_of(args.begin(), args.end(), [](const Formula& a) { return a.kind() == Kind::Atom; }) &&
                            phi.consequent().kind() == Kind::Atom;
        RuleInstance r{atomic ? Rule::PLdep : Rule::MLdep, lf, {}, {}};
        const Formula& psi = phi.consequent();
        const Formula psi_dual = dual(psi);
        for (const auto& h : truth_tuples(args.size())) {
          Alternative alt;
          for (std::size_t j = 0; j < args.size(); ++j) {
            const Formula lit = polarize(args[j], h[j]);
            alt.formulas.push_back({{alpha[0]}, lit});
            alt.formulas.push_back({{alpha[1]}, lit});
          }
          alt.formulas.push_back({alpha, psi});
          alt.formulas.push_back({alpha, psi_dual});
          r.alternatives.push_back(std::move(alt));
        }
        out.push_back(std::move(r));
      }
      break;
    }
    case Kind::Diamond:
    case Kind::Box: break;
  }
  // Equal alternatives (as in φ ∧ φ) would only repeat a child.
  for (RuleInstance& r : out) {
    auto& alts = r.alternatives;
    for (std::size_t k = 1; k < alts.size();) {
      if (std::find(alts.begin(), alts.begin() + static_cast<std::ptrdiff_t>(k), alts[k]) != alts.begin() + static_cast<std::ptrdiff_t>(k)) {
        alts.erase(alts.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        ++k;
      }
    }
  }
  return out;
}

// Lexicographic successor choices, one per element of the label.
void diamond_instances(const Branch& b, const LabeledFormula& lf, std::vector<RuleInstance>& out) {
  const Label& alpha = lf.label;
  if (alpha.empty()) return;
  std::vector<std::vector<std::uint32_t>> options;
  for (std::uint32_t i : alpha) {
    auto succ = b.successors(i);
    if (succ.empty()) return;
    std::sort(succ.begin(), succ.end());
    options.push_back(std::move(succ));
  }
  std::vector<std::size_t> digit(alpha.size(), 0);
  while (true) {
    std::vector<std::uint32_t> chosen;
    for (std::size_t k = 0; k < alpha.size(); ++k) chosen.push_back(options[k][digit[k]]);
    out.push_back({Rule::Diamond, lf, chosen, {{{{as_label(chosen), lf.formula.inner()}}, {}}}});
    std::size_t k = alpha.size();
    while (k > 0 && ++digit[k - 1] == options[k - 1].size()) digit[--k] = 0;
    if (k == 0) return;
  }
}

RuleInstance box_instance(const LabeledFormula& lf, std::uint32_t first_fresh, bool symmetry, std::uint32_t cap) {
  const Label& alpha = lf.label;
  const std::uint64_t t = box_width(lf.formula.inner(), cap);
  RuleInstance r{Rule::Box, lf, {}, {}};
  for (std::uint64_t l = 0; l < t; ++l) r.params.push_back(first_fresh + static_cast<std::uint32_t>(l));
  if (alpha.empty()) return r;
  const Label fresh = r.params;
  // f as a vector of positions into alpha, odometer with the last digit fastest.
  std::vector<std::size_t> f(t, 0);
  while (true) {
    Alternative alt;
    for (std::uint64_t l = 0; l < t; ++l) alt.facts.push_back({alpha[f[l]], fresh[l]});
    alt.formulas.push_back({fresh, lf.formula.inner()});
    r.alternatives.push_back(std::move(alt));
    std::size_t k = t;
    while (k > 0 && ++f[k - 1] == alpha.size()) --k;
    if (k == 0) break;
    for (std::size_t j = k; j < t; ++j) f[j] = symmetry ? f[k - 1] : 0;
  }
  return r;
}

// Every addition is on the branch already, up to label subsumption.
bool present(const Branch& b, const Alternative& alt) {
  return std::all_of(alt.formulas.begin(), alt.formulas.end(), [&](const auto& lf) { return b.subsumed(lf); }) &&
         std::all_of(alt.facts.begin(), alt.facts.end(), [&](const auto& f) { return b.contains(f); });
}

bool satisfied(const Branch& b, const RuleInstance& r) {
  return std::any_of(r.alternatives.begin(), r.alternatives.end(), [&](const Alternative& a) { return present(b, a); });
}

// Whether adding alt to b immediately meets a closure condition.
bool closes(const Branch& b, const Alternative& alt) {
  for (const auto& lf : alt.formulas) {
    if (lf.label.empty()) return true;
    if (lf.label.size() != 1) continue;
    const Formula& phi = lf.formula;
    if (phi.kind() == Kind::Dep) return true;
    if (!phi.is_literal()) continue;
    LabeledFormula other{lf.label, phi.kind() == Kind::Atom ? Formula::neg_atom(phi.name()) : Formula::atom(phi.name())};
    if (b.contains(other)) return true;
    if (std::find(alt.formulas.begin(), alt.formulas.end(), other) != alt.formulas.end()) return true;
  }
  return false;
}

}  // namespace

LabeledFormula root_for(const Formula& phi, std::uint32_t label_cap) {
  const LogicId logic = classify(phi);
  std::uint64_t exponent = vr(phi);
  if (!is_modal(logic)) exponent = std::min<std::uint64_t>(exponent, propositions(phi).size());
  if (exponent >= 32 || (std::uint64_t{1} << exponent) > label_cap) {
    throw Error(ErrorCode::ResourceLimit,
                "root label of 2^" + std::to_string(exponent) + " indices exceeds the cap of " + std::to_string(label_cap));
  }
  Label label;
  for (std::uint32_t i = 1; i <= (std::uint32_t{1} << exponent); ++i) label.push_back(i);
  return {std::move(label), phi};
}

std::vector<RuleInstance> enumerate_instances(const Branch& b, std::optional<std::uint32_t> next_fresh,
                                              bool box_symmetry) {
  std::uint32_t fresh = next_fresh.value_or(b.max_index() + 1);
  if (fresh <= b.max_index()) throw Error(ErrorCode::NotApplicable, "fresh indices must exceed every index on the branch");
  const auto cap = static_cast<std::uint32_t>(b.root().label.size());
  std::vector<RuleInstance> out;
  for (const Entry& e : b.entries()) {
    const auto* lf = std::get_if<LabeledFormula>(&e);
    if (lf == nullptr) continue;
    std::vector<RuleInstance> here;
    if (lf->formula.kind() == Kind::Diamond) {
      diamond_instances(b, *lf, here);
    } else if (lf->formula.kind() == Kind::Box) {
      if (!b.box_applied(*lf)) {
        here.push_back(box_instance(*lf, fresh, box_symmetry, std::max<std::uint32_t>(cap, 1)));
        fresh += static_cast<std::uint32_t>(here.back().params.size());
      }
    } else {
      here = static_instances(*lf);
    }
    for (auto& r : here) {
      if (r.rule == Rule::Box || !satisfied(b, r)) out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

std::optional<RuleInstance> rebuild(const Branch& b, const RuleInstance& r, bool symmetry) {
  switch (r.rule) {
    case Rule::Diamond: {
      std::vector<RuleInstance> options;
      diamond_instances(b, r.principal, options);
      for (auto& o : options) {
        if (o.params == r.params) return o;
      }
      return std::nullopt;
    }
    case Rule::Box:
      if (r.principal.formula.kind() != Kind::Box || b.box_applied(r.principal) || r.params.empty() ||
          r.params.front() <= b.max_index()) {
        return std::nullopt;
      }
      return box_instance(r.principal, r.params.front(), symmetry,
                          static_cast<std::uint32_t>(std::max<std::size_t>(b.root().label.size(), 1)));
    default:
      for (auto& o : static_instances(r.principal)) {
        if (o.rule == r.rule && o.params == r.params) return o;
      }
      return std::nullopt;
  }
}

}  // namespace


std::vector<Branch> apply_instance(const Branch& b, const RuleInstance& r, bool box_symmetry) {
  const auto expected = b.contains(r.principal) ? rebuild(b, r, box_symmetry) : std::nullopt;
  if (!expected || *expected != r || (r.rule != Rule::Box && satisfied(b, r))) throw Error(ErrorCode::NotApplicable, "rule instance is not applicable to this branch");
  std::vector<Branch> children;
  for (const Alternative& alt : r.alternatives) {
    Branch child = b;
    for (const auto& f : alt.facts) child.add(f);
    for (const auto& lf : alt.formulas) child.add(lf);
    if (r.rule == Rule::Box) child.mark_box_applied(r.principal);
    children.push_back(std::move(child));
  }
  return children;
}

// ---------------------------------------------------------------------------
// Countermodels

namespace {

void require_open_saturated(const Branch& b) {
  if (b.closure() || is_closed(b)) throw Error(ErrorCode::NotSaturated, "branch is closed");
  if (!enumerate_instances(b).empty()) throw Error(ErrorCode::NotSaturated, "branch is not saturated");
}

}  // namespace

PropTeam extract_prop_countermodel(const Branch& b) {
  const LabeledFormula& root = b.root();
  if (root.formula.features() & detail::kHasModal) {
    throw Error(ErrorCode::WrongLogic, "propositional extraction on a modal branch");
  }
  require_open_saturated(b);
  const auto props = propositions(root.formula);
  PropTeam team(props);
  for (std::uint32_t i : root.label) {
    std::vector<bool> row;
    for (const auto& p : props) row.push_back(b.contains(LabeledFormula{{i}, Formula::neg_atom(p)}));
    team.insert_row(std::move(row));
  }
  if (satisfies_prop(team, root.formula)) {
    throw Error(ErrorCode::Internal, "extracted team satisfies the root formula " + print(root.formula));
  }
  return team;
}

ModalCountermodel extract_modal_countermodel(const Branch& b) {
  require_open_saturated(b);
  const LabeledFormula& root = b.root();
  const auto indices = b.indices();
  std::vector<std::string> names;
  std::map<std::uint32_t, World> world_of;
  for (std::uint32_t i : indices) {
    world_of[i] = names.size();
    names.push_back(std::to_string(i));
  }
  KripkeModel model(std::move(names));
  for (const Entry& e : b.entries()) {
    if (const auto* f = std::get_if<AccessFact>(&e)) model.add_edge(world_of.at(f->source), world_of.at(f->target));
  }
  for (const auto& p : propositions(root.formula)) {
    model.declare(p);
    for (std::uint32_t i : indices) {
      if (b.contains(LabeledFormula{{i}, Formula::neg_atom(p)})) model.set_true(p, world_of.at(i));
    }
  }
  WorldTeam team;
  for (std::uint32_t i : root.label) team.insert(world_of.at(i));
  if (satisfies_modal(model, team, root.formula)) {
    throw Error(ErrorCode::Internal, "induced model satisfies the root formula " + print(root.formula));
  }
  return {std::move(model), std::move(team)};
}

// ---------------------------------------------------------------------------
// Proof search

namespace {

class Prover {
 public:
  Prover(const ProveOptions& options, Verdict& verdict)
      : options_(options), verdict_(verdict), branch_(verdict.root) {
    root_size_ = verdict.root.label.size();
    next_fresh_ = branch_.max_index() + 1;
  }

  bool run() {
    if (const auto& c = branch_.closure()) {
      close(0, *c);
      return true;
    }
    Deps deps;
    return search(0, 0, deps);
  }

 private:
  struct Choice {
    const RuleInstance* instance = nullptr;
    std::optional<RuleInstance> owned;
    std::size_t live = SIZE_MAX;
  };

  const std::vector<RuleInstance>& cached(const LabeledFormula& lf) {
    auto it = cache_.find(lf);
    if (it == cache_.end()) it = cache_.emplace(lf, static_instances(lf)).first;
    return it->second;
  }

  std::size_t live_count(const RuleInstance& r) const {
    std::size_t n = 0;
    for (const auto& alt : r.alternatives) n += closes(branch_, alt) ? 0 : 1;
    return n;
  }

  // Instances that close or do not branch go first. Otherwise decomposing
  // rules beat (Or), whose many split instances only pay off once singleton
  // literals are around; fewer surviving alternatives break ties. (Box)
  // waits until nothing else applies.
  static std::size_t rank(const RuleInstance& r, std::size_t live) {
    if (r.rule == Rule::Diamond) return 2000 + live;
    return r.rule == Rule::Or ? 1000 + live : live;
  }

  Choice choose() {
    Choice best;
    std::size_t best_rank = SIZE_MAX;
    const LabeledFormula* box = nullptr;
    std::vector<RuleInstance> dynamic;
    auto consider = [&](const RuleInstance& r, std::vector<RuleInstance>* owner) {
      if (satisfied(branch_, r)) return false;
      const std::size_t live = live_count(r);
      const std::size_t score = live == 0 || (live == 1 && r.rule != Rule::Diamond) ? live : rank(r, live);
      if (score >= best_rank) return false;
      best_rank = score;
      best.live = live;
      if (owner != nullptr) {
        best.owned = r;
        best.instance = &*best.owned;
      } else {
        best.owned.reset();
        best.instance = &r;
      }
      return score == 0;
    };
    for (std::size_t e = 0; e < branch_.entries().size(); ++e) {
      const auto* lf = std::get_if<LabeledFormula>(&branch_.entries()[e]);
      if (lf == nullptr) continue;
      const Kind kind = lf->formula.kind();
      if (kind == Kind::Box) {
        if (box == nullptr && !branch_.box_applied(*lf)) box = lf;
        continue;
      }
      if (kind == Kind::Diamond) {
        dynamic.clear();
        diamond_instances(branch_, *lf, dynamic);
        for (const auto& r : dynamic) {
          if (consider(r, &dynamic)) return best;
        }
        continue;
      }
      for (const RuleInstance& r : cached(*lf)) {
        if (consider(r, nullptr)) return best;
      }
    }
    if (best.instance == nullptr && box != nullptr) {
      best.owned = box_instance(*box, next_fresh_, options_.box_symmetry, static_cast<std::uint32_t>(root_size_));
      best.instance = &*best.owned;
      for (std::uint32_t i : best.owned->params) {
        if (i <= branch_.max_index()) throw Error(ErrorCode::Internal, "fresh index collides with the branch");
      }
      next_fresh_ += static_cast<std::uint32_t>(best.owned->params.size());
    }
    return best;
  }

  void close(std::uint64_t id, const Closure& c) {
    ++verdict_.stats.closed_branches;
    if (options_.record_trace) verdict_.trace.push_back(ClosureEvent{id, c});
  }

  // Sorted positions of the branch entries a closed subtree relies on.
  using Deps = std::vector<std::size_t>;

  Deps closure_deps(const Closure& c) const {
    Deps d;
    for (const auto& lf : c.entries) d.push_back(branch_.position(lf));
    std::sort(d.begin(), d.end());
    return d;
  }

  // The principal, and for (Diamond) the facts the chosen successors hang on.
  Deps step_deps(const RuleInstance& r) const {
    Deps d{branch_.position(r.principal)};
    if (r.rule == Rule::Diamond) {
      for (std::size_t k = 0; k < r.params.size(); ++k) {
        d.push_back(branch_.position(AccessFact{r.principal.label[k], r.params[k]}));
      }
    }
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }

  static void merge_into(Deps& into, const Deps& more) {
    Deps out;
    std::set_union(into.begin(), into.end(), more.begin(), more.end(), std::back_inserter(out));
    into = std::move(out);
  }

  // Drops the step recorded at `step_at` together with the siblings before
  // child `from`, whose subtree (starting at `segment`) takes over `id`.
  void splice(std::size_t step_at, std::size_t segment, std::uint64_t from, std::uint64_t id) {
    auto& trace = verdict_.trace;
    for (std::size_t i = segment; i < trace.size(); ++i) {
      if (auto* step = std::get_if<TraceStep>(&trace[i])) {
        if (step->branch == from) step->branch = id;
        for (auto& child : step->children) {
          if (child == from) child = id;
        }
      } else if (auto* ev = std::get_if<ClosureEvent>(&trace[i])) {
        if (ev->branch == from) ev->branch = id;
      } else {
        auto& re = std::get<ReuseEvent>(trace[i]);
        if (re.branch == from) re.branch = id;
        if (re.source == from) re.source = id;
      }
    }
    trace.erase(trace.begin() + static_cast<std::ptrdiff_t>(step_at), trace.begin() + static_cast<std::ptrdiff_t>(segment));
  }

  bool search(std::uint64_t id, std::uint64_t depth, Deps& deps) {
    auto& stats = verdict_.stats;
    if (++stats.nodes > options_.node_limit) {
      throw Error(ErrorCode::ResourceLimit,
                  "node limit of " + std::to_string(options_.node_limit) + " reached after " +
                      std::to_string(stats.branches) + " branches (" + std::to_string(stats.closed_branches) +
                      " closed, depth " + std::to_string(stats.max_depth) + ")");
    }
    stats.max_depth = std::max(stats.max_depth, depth);

    Choice choice = choose();
    if (choice.instance == nullptr) {
      verdict_.open_branch = branch_;
      return false;
    }
    // The instance may live in the cache; keep a stable copy while recursing.
    const RuleInstance instance = choice.owned ? std::move(*choice.owned) : *choice.instance;
    std::vector<std::uint64_t> children;
    if (instance.alternatives.size() == 1) {
      children.push_back(id);
    } else {
      for (std::size_t k = 0; k < instance.alternatives.size(); ++k) children.push_back(next_branch_++);
      stats.branches += instance.alternatives.size() - 1;
    }
    const std::size_t step_at = verdict_.trace.size();
    if (options_.record_trace) verdict_.trace.push_back(TraceStep{id, instance, children});

    Deps used = step_deps(instance);
    // Closed children whose proof never read the facts they added: a later
    // sibling with the same formulas closes by the very same steps.
    struct Reusable {
      std::size_t alt;
      Deps deps;
    };
    std::vector<Reusable> reusable;
    for (std::size_t k = 0; k < instance.alternatives.size(); ++k) {
      const Alternative& alt = instance.alternatives[k];
      const auto same = std::find_if(reusable.begin(), reusable.end(), [&](const Reusable& r) {
        return instance.alternatives[r.alt].formulas == alt.formulas;
      });
      if (same != reusable.end()) {
        if (options_.record_trace) verdict_.trace.push_back(ReuseEvent{children[k], children[same->alt]});
        merge_into(used, same->deps);
        continue;
      }
      const std::size_t mark = branch_.mark();
      const std::size_t first_new = branch_.entries().size();
      for (const auto& f : alt.facts) branch_.add(f);
      for (const auto& lf : alt.formulas) {
        if (lf.label.size() > root_size_) {
          throw Error(ErrorCode::Internal, "label larger than the root label");
        }
        branch_.add(lf);
      }
      if (instance.rule == Rule::Box) branch_.mark_box_applied(instance.principal);
      const std::size_t segment = verdict_.trace.size();
      Deps child;
      if (const auto& c = branch_.closure()) {
        close(children[k], *c);
        child = closure_deps(*c);
      } else if (!search(children[k], depth + 1, child)) {
        return false;
      }
      bool reads_facts = false;
      for (const auto& f : alt.facts) {
        const std::size_t at = branch_.position(f);
        reads_facts = reads_facts || (at >= first_new && std::binary_search(child.begin(), child.end(), at));
      }
      branch_.rollback(mark);
      if (child.empty() || child.back() < first_new) {
        // This child closed without anything the step added, so the step
        // was not needed here at all.
        if (options_.record_trace) splice(step_at, segment, children[k], id);
        deps = std::move(child);
        return true;
      }
      child.erase(std::lower_bound(child.begin(), child.end(), first_new), child.end());
      merge_into(used, child);
      if (!reads_facts) reusable.push_back({k, std::move(child)});
    }
    deps = std::move(used);
    return true;
  }

  const ProveOptions& options_;
  Verdict& verdict_;
  Branch branch_;
  std::size_t root_size_ = 1;
  std::uint32_t next_fresh_ = 1;
  std::uint64_t next_branch_ = 1;
  std::unordered_map<LabeledFormula, std::vector<RuleInstance>, LabeledFormulaHash> cache_;
};

}  // namespace

Verdict prove(const Formula& phi, const ProveOptions& options) {
  Verdict v{phi, root_for(phi, options.label_cap), false, {}, {}, {}, {}, {}};
  Prover prover(options, v);
  v.closed = prover.run();
  if (!v.closed) {
    if (phi.features() & detail::kHasModal) {
      v.modal_countermodel = extract_modal_countermodel(*v.open_branch);
    } else {
      v.prop_countermodel = extract_prop_countermodel(*v.open_branch);
    }
  }
  return v;
}

namespace {

bool fact_less(const AccessFact& a, const AccessFact& b) {
  return std::pair(a.source, a.target) < std::pair(b.source, b.target);
}

// What replaying a closed subtree on another branch depends on, besides the
// formulas and (Box) marks it started from.
using FormulaSet = std::unordered_set<LabeledFormula, LabeledFormulaHash>;

struct Footprint {
  FormulaSet formulas;  // at the start, only for reuse sources
  FormulaSet boxed;
  std::vector<AccessFact> read;     // facts named by (Diamond) steps
  std::vector<AccessFact> created;  // facts added by (Box) steps inside
  std::uint32_t min_fresh = UINT32_MAX;
};

FormulaSet formula_set(const Branch& b) {
  FormulaSet out;
  for (const Entry& e : b.entries()) {
    if (const auto* lf = std::get_if<LabeledFormula>(&e)) out.insert(*lf);
  }
  return out;
}

// Walks the recorded tree depth-first, replaying each event on an explicit
// Branch. A reuse event is checked against the footprint of its source: the
// replay of that proof would read nothing else, so equal formulas and marks,
// the facts it reads, and room for its fresh indices make it go through.
class TraceChecker {
 public:
  TraceChecker(const Verdict& v, bool box_symmetry) : v_(v), box_symmetry_(box_symmetry) {
    for (std::size_t i = 0; i < v.trace.size(); ++i) {
      const std::uint64_t id = std::visit([](const auto& e) { return e.branch; }, v.trace[i]);
      events_of_[id].push_back(i);
      if (const auto* re = std::get_if<ReuseEvent>(&v.trace[i])) sources_.insert(re->source);
    }
  }

  std::string run() {
    Footprint fp;
    walk(0, Branch(v_.root), fp);
    if (!error_.empty()) return error_;
    for (const auto& [id, list] : events_of_) {
      if (cursor_[id] != list.size()) return "event " + std::to_string(list[cursor_[id]]) + ": not reachable from the root";
    }
    if (v_.closed) {
      if (open_leaf_) return "branch " + std::to_string(*open_leaf_) + " left open";
      return {};
    }
    if (!v_.open_branch) return "open verdict without a branch";
    if (!reached_open_) return "reported open branch not reached by the trace";
    return {};
  }

 private:
  static void absorb(Footprint& into, const Footprint& from) {
    into.read.insert(into.read.end(), from.read.begin(), from.read.end());
    into.created.insert(into.created.end(), from.created.begin(), from.created.end());
    into.min_fresh = std::min(into.min_fresh, from.min_fresh);
  }

  // Returns true when the subtree rooted at `id` closed.
  bool walk(std::uint64_t id, Branch b, Footprint& fp) {
    if (sources_.contains(id)) {
      fp.formulas = formula_set(b);
      fp.boxed = FormulaSet(b.boxed().begin(), b.boxed().end());
    }
    const bool closed = walk_events(id, b, fp);
    if (closed && error_.empty()) {
      std::sort(fp.read.begin(), fp.read.end(), fact_less);
      fp.read.erase(std::unique(fp.read.begin(), fp.read.end()), fp.read.end());
      std::sort(fp.created.begin(), fp.created.end(), fact_less);
      fp.created.erase(std::unique(fp.created.begin(), fp.created.end()), fp.created.end());
      if (sources_.contains(id)) closed_.emplace(id, fp);
    }
    return closed;
  }

  bool walk_events(std::uint64_t id, Branch& b, Footprint& fp) {
    const auto found = events_of_.find(id);
    const std::size_t count = found == events_of_.end() ? 0 : found->second.size();
    std::size_t k = 0;
    while (error_.empty()) {
      if (k == count) {
        if (!open_leaf_) open_leaf_ = id;
        if (v_.open_branch && b.entries() == v_.open_branch->entries()) reached_open_ = true;
        return false;
      }
      const std::size_t index = found->second[k++];
      cursor_[id] = k;
      const std::string at = "event " + std::to_string(index) + ": ";
      const TraceEvent& event = v_.trace[index];
      if (const auto* ev = std::get_if<ClosureEvent>(&event)) {
        if (!is_closed(b)) return fail(at + "branch " + std::to_string(id) + " is not closed");
        for (const auto& lf : ev->closure.entries) {
          if (!b.contains(lf)) return fail(at + "closure entry missing from branch");
        }
        if (k != count) return fail(at + "events after a closure");
        return true;
      }
      if (const auto* re = std::get_if<ReuseEvent>(&event)) {
        if (k != count) return fail(at + "events after a reuse");
        const auto src = closed_.find(re->source);
        if (src == closed_.end()) return fail(at + "reuse of a branch not closed so far");
        const Footprint& s = src->second;
        if (formula_set(b) != s.formulas || FormulaSet(b.boxed().begin(), b.boxed().end()) != s.boxed) return fail(at + "reused branch differs in formulas");
        for (const AccessFact& f : s.read) {
          if (!b.contains(f) && !std::binary_search(s.created.begin(), s.created.end(), f, fact_less)) {
            return fail(at + "reused proof needs a fact missing here");
          }
        }
        if (s.min_fresh <= b.max_index()) return fail(at + "reused proof's fresh indices clash");
        absorb(fp, s);
        return true;
      }
      const auto& step = std::get<TraceStep>(event);
      const RuleInstance& r = step.instance;
      if (!b.contains(r.principal)) return fail(at + "principal is not on the branch");
      const auto expected = rebuild(b, r, box_symmetry_);
      if (!expected || expected->alternatives != r.alternatives) return fail(at + "alternatives do not match the rule");
      if (r.rule != Rule::Box && satisfied(b, r)) return fail(at + "instance was already satisfied");
      if (step.children.size() != r.alternatives.size()) return fail(at + "child count mismatch");
      if (r.rule == Rule::Diamond) {
        for (std::size_t j = 0; j < r.params.size(); ++j) fp.read.push_back({r.principal.label[j], r.params[j]});
      }
      if (r.rule == Rule::Box && !r.params.empty()) {
        fp.min_fresh = std::min(fp.min_fresh, r.params.front());
        for (const Alternative& alt : r.alternatives) fp.created.insert(fp.created.end(), alt.facts.begin(), alt.facts.end());
      }
      const bool linear = step.children.size() == 1 && step.children.front() == id;
      if (linear) {
        const Alternative& alt = r.alternatives.front();
        for (const auto& f : alt.facts) b.add(f);
        for (const auto& lf : alt.formulas) b.add(lf);
        if (r.rule == Rule::Box) b.mark_box_applied(r.principal);
        continue;
      }
      if (k != count) return fail(at + "events after a branching step");
      bool all_closed = true;
      for (std::size_t c = 0; c < r.alternatives.size() && error_.empty(); ++c) {
        const Alternative& alt = r.alternatives[c];
        Branch child = b;
        for (const auto& f : alt.facts) child.add(f);
        for (const auto& lf : alt.formulas) child.add(lf);
        if (r.rule == Rule::Box) child.mark_box_applied(r.principal);
        const std::uint64_t cid = step.children[c];
        if (cid == id || !seen_.insert(cid).second) return fail(at + "child id reused");
        Footprint sub;
        const bool closed = walk(cid, std::move(child), sub);
        absorb(fp, sub);
        if (!closed) {
          all_closed = false;
          // An open child ends the search: later siblings were never visited.
          if (!v_.closed) break;
        }
      }
      return all_closed && error_.empty();
    }
    return false;
  }

  bool fail(std::string message) {
    if (error_.empty()) error_ = std::move(message);
    return false;
  }

  const Verdict& v_;
  bool box_symmetry_;
  std::map<std::uint64_t, std::vector<std::size_t>> events_of_;
  std::map<std::uint64_t, std::size_t> cursor_;
  std::map<std::uint64_t, Footprint> closed_;
  std::set<std::uint64_t> sources_;
  std::set<std::uint64_t> seen_;
  std::optional<std::uint64_t> open_leaf_;
  bool reached_open_ = false;
  std::string error_;
};

}  // namespace

std::string check_trace(const Verdict& v, bool box_symmetry) { return TraceChecker(v, box_symmetry).run(); }

// ---------------------------------------------------------------------------
// JSON

Json to_json(const LabeledFormula& lf) {
  Json out;
  out["label"] = lf.label;
  out["formula"] = print(lf.formula);
  return out;
}

namespace {

Json params_json(const RuleInstance& r) {
  Json out = Json::object();
  switch (r.rule) {
    case Rule::Or: out["beta"] = r.params; break;
    case Rule::Diamond: out["successors"] = r.params; break;
    case Rule::Box: out["fresh"] = r.params; break;
    default: break;
  }
  return out;
}

Json entry_json(const Entry& e) {
  if (const auto* lf = std::get_if<LabeledFormula>(&e)) return to_json(*lf);
  const auto& f = std::get<AccessFact>(e);
  Json out;
  out["relation"] = {f.source, f.target};
  return out;
}

}  // namespace

Json proof_to_json(const Verdict& v) {
  Json out;
  out["version"] = "teamtab-proof/1";
  out["formula"] = print(v.formula);
  out["root"] = v.root.label;
  out["verdict"] = v.closed ? "closed" : "open";
  out["stats"] = {{"nodes", v.stats.nodes},
                  {"branches", v.stats.branches},
                  {"closed_branches", v.stats.closed_branches},
                  {"max_depth", v.stats.max_depth}};
  Json trace = Json::array();
  for (const TraceEvent& event : v.trace) {
    Json j;
    if (const auto* step = std::get_if<TraceStep>(&event)) {
      j["branch"] = step->branch;
      j["rule"] = to_string(step->instance.rule);
      j["principal"] = to_json(step->instance.principal);
      j["params"] = params_json(step->instance);
      j["children"] = step->children;
    } else if (const auto* re = std::get_if<ReuseEvent>(&event)) {
      j["branch"] = re->branch;
      j["same_as"] = re->source;
    } else {
      const auto& ev = std::get<ClosureEvent>(event);
      j["branch"] = ev.branch;
      j["closed"] = to_string(ev.closure.reason);
      Json entries = Json::array();
      for (const auto& lf : ev.closure.entries) entries.push_back(to_json(lf));
      j["entries"] = std::move(entries);
    }
    trace.push_back(std::move(j));
  }
  out["trace"] = std::move(trace);
  if (v.prop_countermodel) out["countermodel"] = to_json(*v.prop_countermodel);
  if (v.modal_countermodel) out["countermodel"] = to_json(*v.modal_countermodel);
  if (v.open_branch) {
    Json entries = Json::array();
    for (const Entry& e : v.open_branch->entries()) entries.push_back(entry_json(e));
    out["open_branch"] = std::move(entries);
  }
  return out;
}

std::string serialize_proof(const Verdict& v) { return proof_to_json(v).dump(2); }

}  // namespace teamtab
