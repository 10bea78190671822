#include "teamtab/semantics.hpp"

#include <algorithm>
#include <bit>
#include <boost/dynamic_bitset.hpp>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "teamtab/error.hpp"

namespace teamtab {

// ---------------------------------------------------------------------------
// PropTeam

PropTeam::PropTeam(std::vector<std::string> domain) : domain_(std::move(domain)) {
  std::sort(domain_.begin(), domain_.end());
  if (std::adjacent_find(domain_.begin(), domain_.end()) != domain_.end()) {
    throw Error(ErrorCode::InvalidInput, "duplicate proposition in team domain");
  }
}

PropTeam PropTeam::full(std::vector<std::string> domain) {
  PropTeam team(std::move(domain));
  const std::size_t n = team.domain_.size();
  if (n > 20) throw Error(ErrorCode::ResourceLimit, "full team over more than 20 propositions");
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
    std::vector<bool> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = (k >> (n - 1 - j)) & 1;
    team.rows_.insert(std::move(row));
  }
  return team;
}

std::size_t PropTeam::position(std::string_view prop) const {
  const auto it = std::lower_bound(domain_.begin(), domain_.end(), prop);
  if (it == domain_.end() || *it != prop) {
    throw Error(ErrorCode::Domain, "proposition '" + std::string(prop) + "' is outside the team domain");
  }
  return static_cast<std::size_t>(it - domain_.begin());
}

void PropTeam::insert(const Assignment& s) {
  if (s.size() != domain_.size()) {
    throw Error(ErrorCode::Domain, "assignment is not defined exactly on the team domain");
  }
  std::vector<bool> row(domain_.size());
  for (const auto& [prop, value] : s) row[position(prop)] = value;
  rows_.insert(std::move(row));
}

void PropTeam::insert_row(std::vector<bool> row) {
  if (row.size() != domain_.size()) throw Error(ErrorCode::Domain, "row length differs from domain size");
  rows_.insert(std::move(row));
}

std::vector<Assignment> PropTeam::members() const {
  std::vector<Assignment> out;
  for (const auto& row : rows_) {
    Assignment s;
    for (std::size_t j = 0; j < domain_.size(); ++j) s.emplace(domain_[j], row[j]);
    out.push_back(std::move(s));
  }
  return out;
}

bool PropTeam::value(const std::vector<bool>& row, std::string_view prop) const {
  return row.at(position(prop));
}

// ---------------------------------------------------------------------------
// KripkeModel

KripkeModel::KripkeModel(std::vector<std::string> world_names)
    : names_(std::move(world_names)), successors_(names_.size()) {
  if (names_.empty()) throw Error(ErrorCode::InvalidInput, "a Kripke model needs at least one world");
  std::vector<std::string> sorted = names_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidInput, "duplicate world name");
  }
}

void KripkeModel::check(World w) const {
  if (w >= names_.size()) throw Error(ErrorCode::ForeignWorld, "world index outside the model");
}

const std::string& KripkeModel::name(World w) const {
  check(w);
  return names_[w];
}

std::optional<World> KripkeModel::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<World>(it - names_.begin());
}

World KripkeModel::index_of(std::string_view name) const {
  if (auto w = find(name)) return *w;
  throw Error(ErrorCode::ForeignWorld, "unknown world '" + std::string(name) + "'");
}

void KripkeModel::add_edge(World from, World to) {
  check(from);
  check(to);
  auto& succ = successors_[from];
  const auto it = std::lower_bound(succ.begin(), succ.end(), to);
  if (it == succ.end() || *it != to) succ.insert(it, to);
}

bool KripkeModel::has_edge(World from, World to) const {
  check(from);
  return std::binary_search(successors_[from].begin(), successors_[from].end(), to);
}

const std::vector<World>& KripkeModel::successors(World w) const {
  check(w);
  return successors_[w];
}

std::size_t KripkeModel::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : successors_) n += s.size();
  return n;
}

void KripkeModel::declare(const std::string& prop) { valuation_.try_emplace(prop); }

void KripkeModel::set_true(const std::string& prop, World w) {
  check(w);
  valuation_[prop].insert(w);
}

bool KripkeModel::holds(std::string_view prop, World w) const {
  check(w);
  const auto it = valuation_.find(prop);
  return it != valuation_.end() && it->second.contains(w);
}

KripkeModel embed(const PropTeam& team) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < std::max<std::size_t>(team.size(), 1); ++i) names.push_back("s" + std::to_string(i));
  KripkeModel model(std::move(names));
  for (const auto& p : team.domain()) model.declare(p);
  World w = 0;
  for (const auto& row : team.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j]) model.set_true(team.domain()[j], w);
    }
    ++w;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

using Wide = boost::dynamic_bitset<std::uint64_t>;

// Set operations over the two team representations.
struct MaskOps {
  using Set = std::uint64_t;
  std::size_t n;
  Set empty() const { return 0; }
  Set single(World w) const { return Set{1} << w; }
  static void add(Set& s, World w) { s |= Set{1} << w; }
  static bool none(Set s) { return s == 0; }
  static bool contains(Set s, World w) { return (s >> w) & 1; }
  static bool subset(Set a, Set b) { return (a & ~b) == 0; }
  static Set meet(Set a, Set b) { return a & b; }
  static Set join(Set a, Set b) { return a | b; }
  static Set minus(Set a, Set b) { return a & ~b; }
  static std::size_t count(Set s) { return static_cast<std::size_t>(std::popcount(s)); }
  template <class F>
  static void for_each(Set s, F&& f) {
    while (s) {
      f(static_cast<World>(std::countr_zero(s)));
      s &= s - 1;
    }
  }
  // Calls f(Y) for every Y ⊆ X until f returns true.
  template <class F>
  static bool any_subset(Set x, F&& f) {
    Set y = x;
    while (true) {
      if (f(y)) return true;
      if (y == 0) return false;
      y = (y - 1) & x;
    }
  }
};

struct WideOps {
  using Set = Wide;
  std::size_t n;
  Set empty() const { return Set(n); }
  Set single(World w) const {
    Set s(n);
    s.set(w);
    return s;
  }
  static void add(Set& s, World w) { s.set(w); }
  static bool none(const Set& s) { return s.none(); }
  static bool contains(const Set& s, World w) { return s.test(w); }
  static bool subset(const Set& a, const Set& b) { return a.is_subset_of(b); }
  static Set meet(const Set& a, const Set& b) { return a & b; }
  static Set join(const Set& a, const Set& b) { return a | b; }
  static Set minus(const Set& a, const Set& b) { return a - b; }
  static std::size_t count(const Set& s) { return s.count(); }
  template <class F>
  static void for_each(const Set& s, F&& f) {
    for (auto i = s.find_first(); i != Set::npos; i = s.find_next(i)) f(static_cast<World>(i));
  }
  template <class F>
  static bool any_subset(const Set& x, F&& f) {
    std::vector<World> members;
    for_each(x, [&](World w) { members.push_back(w); });
    if (members.size() > 30) {
      throw Error(ErrorCode::ResourceLimit, "splitting a team of more than 30 worlds");
    }
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << members.size()); ++k) {
      Set y(x.size());
      for (std::size_t i = 0; i < members.size(); ++i) {
        if ((k >> i) & 1) y.set(members[i]);
      }
      if (f(y)) return true;
    }
    return false;
  }
};

constexpr std::uint64_t kChoiceLimit = 20'000'000;

template <class Ops>
class Evaluator {
 public:
  using Set = typename Ops::Set;

  Evaluator(const KripkeModel& model, EvalOptions options)
      : model_(model), ops_{model.size()}, options_(options) {
    succ_.reserve(model.size());
    for (World w = 0; w < model.size(); ++w) {
      Set s = ops_.empty();
      for (World v : model.successors(w)) Ops::add(s, v);
      succ_.push_back(std::move(s));
    }
  }

  Set from_team(const WorldTeam& team) const {
    Set s = ops_.empty();
    for (World w : team) {
      if (w >= model_.size()) throw Error(ErrorCode::ForeignWorld, "team contains a world outside the model");
      Ops::add(s, w);
    }
    return s;
  }

  bool eval(const Formula& phi, const Set& team) {
    if (Ops::none(team)) return true;
    switch (phi.kind()) {
      case Kind::Atom: return Ops::subset(team, valuation(phi.name()));
      case Kind::NegAtom: return Ops::none(Ops::meet(team, valuation(phi.name())));
      case Kind::And: return eval(phi.left(), team) && eval(phi.right(), team);
      case Kind::IDis: return eval(phi.left(), team) || eval(phi.right(), team);
      case Kind::Box: return eval(phi.inner(), image(team));
      default: break;
    }
    Key key{phi.identity(), team};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool result = false;
    switch (phi.kind()) {
      case Kind::Or: result = eval_or(phi, team); break;
      case Kind::Diamond: result = eval_diamond(phi, team); break;
      case Kind::Dep: result = eval_dep(phi, team); break;
      default: break;
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  Set image(const Set& team) const {
    Set out = ops_.empty();
    Ops::for_each(team, [&](World w) { out = Ops::join(out, succ_[w]); });
    return out;
  }

 private:
  struct Key {
    const void* node;
    Set team;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<const void*>{}(k.node) * 31 + std::hash<Set>{}(k.team);
    }
  };

  const Set& valuation(const std::string& prop) {
    auto it = valuation_cache_.find(prop);
    if (it == valuation_cache_.end()) {
      Set s = ops_.empty();
      const auto v = model_.valuation().find(prop);
      if (v != model_.valuation().end()) {
        for (World w : v->second) Ops::add(s, w);
      }
      it = valuation_cache_.emplace(prop, std::move(s)).first;
    }
    return it->second;
  }

  // Worlds satisfying a flat formula classically.
  const Set& truth_set(const Formula& phi) {
    if (auto it = truth_cache_.find(phi.identity()); it != truth_cache_.end()) return it->second;
    Set out = ops_.empty();
    switch (phi.kind()) {
      case Kind::Atom: out = valuation(phi.name()); break;
      case Kind::NegAtom: {
        Set all = ops_.empty();
        for (World w = 0; w < model_.size(); ++w) Ops::add(all, w);
        out = Ops::minus(all, valuation(phi.name()));
        break;
      }
      case Kind::And: out = Ops::meet(truth_set(phi.left()), truth_set(phi.right())); break;
      case Kind::Or: out = Ops::join(truth_set(phi.left()), truth_set(phi.right())); break;
      case Kind::Diamond:
      case Kind::Box: {
        const Set inner = truth_set(phi.inner());
        for (World w = 0; w < model_.size(); ++w) {
          const bool ok = phi.kind() == Kind::Diamond ? !Ops::none(Ops::meet(succ_[w], inner))
                                                      : Ops::subset(succ_[w], inner);
          if (ok) Ops::add(out, w);
        }
        break;
      }
      default:
        throw Error(ErrorCode::IllFormed, "dependence atom arguments must be PL/ML formulas");
    }
    return truth_cache_.emplace(phi.identity(), std::move(out)).first->second;
  }

  bool eval_or(const Formula& phi, const Set& team) {
    const Formula& l = phi.left();
    const Formula& r = phi.right();
    if (options_.flat_shortcuts) {
      if (l.is_flat()) return eval(r, Ops::minus(team, truth_set(l)));
      if (r.is_flat()) return eval(l, Ops::minus(team, truth_set(r)));
    }
    return Ops::any_subset(team, [&](const Set& y) {
      return eval(l, y) && eval(r, Ops::minus(team, y));
    });
  }

  bool eval_diamond(const Formula& phi, const Set& team) {
    std::vector<World> members;
    Ops::for_each(team, [&](World w) { members.push_back(w); });
    for (World w : members) {
      if (Ops::none(succ_[w])) return false;
    }
    const Formula& inner = phi.inner();
    if (options_.flat_shortcuts && inner.is_flat()) {
      const Set& good = truth_set(inner);
      return std::all_of(members.begin(), members.end(),
                         [&](World w) { return !Ops::none(Ops::meet(succ_[w], good)); });
    }
    // Choice functions: one successor per member.
    std::vector<const std::vector<World>*> options;
    std::uint64_t total = 1;
    for (World w : members) {
      options.push_back(&model_.successors(w));
      total *= options.back()->size();
      if (total > kChoiceLimit) throw Error(ErrorCode::ResourceLimit, "too many successor choices for '<>'");
    }
    std::unordered_set<Set> seen;
    std::vector<std::size_t> digit(members.size(), 0);
    while (true) {
      Set chosen = ops_.empty();
      for (std::size_t i = 0; i < members.size(); ++i) Ops::add(chosen, (*options[i])[digit[i]]);
      if (seen.insert(chosen).second && eval(inner, chosen)) return true;
      std::size_t i = 0;
      while (i < members.size() && ++digit[i] == options[i]->size()) digit[i++] = 0;
      if (i == members.size()) return false;
    }
  }

  bool eval_dep(const Formula& phi, const Set& team) {
    const auto args = phi.antecedents();
    const Set& consequent = truth_set(phi.consequent());
    std::vector<const Set*> antecedent_sets;
    for (const Formula& a : args) antecedent_sets.push_back(&truth_set(a));
    std::map<std::vector<bool>, bool> seen;
    bool ok = true;
    Ops::for_each(team, [&](World w) {
      if (!ok) return;
      std::vector<bool> key(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) key[i] = Ops::contains(*antecedent_sets[i], w);
      const bool value = Ops::contains(consequent, w);
      const auto [it, fresh] = seen.emplace(std::move(key), value);
      if (!fresh && it->second != value) ok = false;
    });
    return ok;
  }

  const KripkeModel& model_;
  Ops ops_;
  EvalOptions options_;
  std::vector<Set> succ_;
  std::unordered_map<std::string, Set> valuation_cache_;
  std::unordered_map<const void*, Set> truth_cache_;
  std::unordered_map<Key, bool, KeyHash> memo_;
};

void require_propositional(const Formula& phi) {
  if (phi.features() & detail::kHasModal) {
    throw Error(ErrorCode::WrongLogic, "propositional team semantics cannot evaluate modal operators");
  }
}

}  // namespace

struct ModelChecker::Impl {
  std::variant<Evaluator<MaskOps>, Evaluator<WideOps>> eval;
};

ModelChecker::ModelChecker(const KripkeModel& model, EvalOptions options)
    : impl_(model.size() <= 64
                ? std::make_unique<Impl>(Impl{Evaluator<MaskOps>(model, options)})
                : std::make_unique<Impl>(Impl{Evaluator<WideOps>(model, options)})) {}

ModelChecker::~ModelChecker() = default;
ModelChecker::ModelChecker(ModelChecker&&) noexcept = default;
ModelChecker& ModelChecker::operator=(ModelChecker&&) noexcept = default;

bool ModelChecker::satisfies(const WorldTeam& team, const Formula& phi) {
  return std::visit([&](auto& e) { return e.eval(phi, e.from_team(team)); }, impl_->eval);
}

bool ModelChecker::satisfies_mask(std::uint64_t team, const Formula& phi) {
  auto* e = std::get_if<Evaluator<MaskOps>>(&impl_->eval);
  if (e == nullptr) throw Error(ErrorCode::ResourceLimit, "mask queries need at most 64 worlds");
  return e->eval(phi, team);
}

bool satisfies_prop(const PropTeam& team, const Formula& phi, EvalOptions options) {
  require_propositional(phi);
  for (const auto& p : propositions(phi)) team.position(p);
  if (team.empty()) return true;
  const KripkeModel model = embed(team);
  WorldTeam all;
  for (World w = 0; w < model.size(); ++w) all.insert(w);
  return ModelChecker(model, options).satisfies(all, phi);
}

bool satisfies_modal(const KripkeModel& model, const WorldTeam& team, const Formula& phi,
                     EvalOptions options) {
  return ModelChecker(model, options).satisfies(team, phi);
}

WorldTeam image(const KripkeModel& model, const WorldTeam& team) {
  WorldTeam out;
  for (World w : team) {
    const auto& succ = model.successors(w);
    out.insert(succ.begin(), succ.end());
  }
  return out;
}

bool team_related(const KripkeModel& model, const WorldTeam& t, const WorldTeam& s) {
  for (World v : s) model.name(v);
  for (World w : t) {
    const auto& succ = model.successors(w);
    if (std::none_of(succ.begin(), succ.end(), [&](World v) { return s.contains(v); })) return false;
  }
  for (World v : s) {
    if (std::none_of(t.begin(), t.end(), [&](World w) { return model.has_edge(w, v); })) return false;
  }
  return true;
}

bool holds_at(const KripkeModel& model, World w, const Formula& phi) {
  switch (phi.kind()) {
    case Kind::Atom: return model.holds(phi.name(), w);
    case Kind::NegAtom: return !model.holds(phi.name(), w);
    case Kind::And: return holds_at(model, w, phi.left()) && holds_at(model, w, phi.right());
    case Kind::Or: return holds_at(model, w, phi.left()) || holds_at(model, w, phi.right());
    case Kind::Diamond: {
      const auto& succ = model.successors(w);
      return std::any_of(succ.begin(), succ.end(), [&](World v) { return holds_at(model, v, phi.inner()); });
    }
    case Kind::Box: {
      const auto& succ = model.successors(w);
      return std::all_of(succ.begin(), succ.end(), [&](World v) { return holds_at(model, v, phi.inner()); });
    }
    default: break;
  }
  throw Error(ErrorCode::WrongLogic, "pointwise evaluation needs a PL or ML formula");
}

bool pointwise_satisfies(const KripkeModel& model, const WorldTeam& team, const Formula& phi) {
  if (!phi.is_flat()) throw Error(ErrorCode::WrongLogic, "pointwise evaluation needs a PL or ML formula");
  return std::all_of(team.begin(), team.end(), [&](World w) { return holds_at(model, w, phi); });
}

namespace {

bool holds_row(const PropTeam& team, const std::vector<bool>& row, const Formula& phi) {
  switch (phi.kind()) {
    case Kind::Atom: return team.value(row, phi.name());
    case Kind::NegAtom: return !team.value(row, phi.name());
    case Kind::And: return holds_row(team, row, phi.left()) && holds_row(team, row, phi.right());
    case Kind::Or: return holds_row(team, row, phi.left()) || holds_row(team, row, phi.right());
    default: break;
  }
  throw Error(ErrorCode::WrongLogic, "pointwise evaluation needs a PL formula");
}

}  // namespace

bool pointwise_satisfies_prop(const PropTeam& team, const Formula& phi) {
  if (!phi.is_flat()) throw Error(ErrorCode::WrongLogic, "pointwise evaluation needs a PL formula");
  require_propositional(phi);
  return std::all_of(team.rows().begin(), team.rows().end(),
                     [&](const auto& row) { return holds_row(team, row, phi); });
}

}  // namespace teamtab
