#pragma once

// Team semantics for propositional teams and for teams of Kripke models.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "teamtab/formula.hpp"

namespace teamtab {

using Assignment = std::map<std::string, bool>;

/// A set of assignments over a common finite domain.
class PropTeam {
 public:
  explicit PropTeam(std::vector<std::string> domain);
  /// {0,1}^D
  static PropTeam full(std::vector<std::string> domain);

  /// Throws Error(Domain) unless s is defined exactly on the domain.
  void insert(const Assignment& s);
  /// Values aligned with domain().
  void insert_row(std::vector<bool> row);

  const std::vector<std::string>& domain() const { return domain_; }
  const std::set<std::vector<bool>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::vector<Assignment> members() const;
  /// Throws Error(Domain) for propositions outside the domain.
  bool value(const std::vector<bool>& row, std::string_view prop) const;
  std::size_t position(std::string_view prop) const;

  friend bool operator==(const PropTeam&, const PropTeam&) = default;

 private:
  std::vector<std::string> domain_;
  std::set<std::vector<bool>> rows_;
};

using World = std::size_t;
using WorldTeam = std::set<World>;

/// K = (W, R, V). Worlds are indices 0..size()-1 carrying opaque names.
/// Propositions absent from the valuation are false everywhere.
class KripkeModel {
 public:
  explicit KripkeModel(std::vector<std::string> world_names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(World w) const;
  const std::vector<std::string>& names() const { return names_; }
  std::optional<World> find(std::string_view name) const;
  /// Throws Error(ForeignWorld) for unknown names.
  World index_of(std::string_view name) const;

  void add_edge(World from, World to);
  bool has_edge(World from, World to) const;
  const std::vector<World>& successors(World w) const;
  std::size_t edge_count() const;

  /// Makes `prop` known to the model (possibly with an empty extension).
  void declare(const std::string& prop);
  void set_true(const std::string& prop, World w);
  bool holds(std::string_view prop, World w) const;
  const std::map<std::string, std::set<World>, std::less<>>& valuation() const { return valuation_; }

  friend bool operator==(const KripkeModel&, const KripkeModel&) = default;

 private:
  void check(World w) const;

  std::vector<std::string> names_;
  std::vector<std::vector<World>> successors_;
  std::map<std::string, std::set<World>, std::less<>> valuation_;
};

/// A model together with a team of it; used for countermodels and model files.
struct ModalCountermodel {
  KripkeModel model;
  WorldTeam team;
};

struct EvalOptions {
  /// Decide ∨ with a flat disjunct, and ◇ of a flat formula, from pointwise
  /// truth sets instead of enumerating splits or successor choices. Same
  /// answers by flatness and downward closure; off gives the literal clauses.
  bool flat_shortcuts = true;
};

/// One world per assignment, empty relation.
KripkeModel embed(const PropTeam& team);

/// X ⊨ φ. Throws Domain for propositions outside the team's domain and
/// WrongLogic for modal formulas.
bool satisfies_prop(const PropTeam& team, const Formula& phi, EvalOptions options = {});
/// Classical evaluation at every assignment of the team.
bool pointwise_satisfies_prop(const PropTeam& team, const Formula& phi);

/// K,T ⊨ φ. Throws ForeignWorld when T ⊄ W.
bool satisfies_modal(const KripkeModel& model, const WorldTeam& team, const Formula& phi,
                     EvalOptions options = {});
/// R[T]
WorldTeam image(const KripkeModel& model, const WorldTeam& team);
/// T[R]S
bool team_related(const KripkeModel& model, const WorldTeam& t, const WorldTeam& s);
/// Classical K,w ⊨ φ for a PL/ML formula.
bool holds_at(const KripkeModel& model, World w, const Formula& phi);
/// ∀w ∈ T: K,w ⊨ φ. Throws WrongLogic unless φ is a PL/ML formula.
bool pointwise_satisfies(const KripkeModel& model, const WorldTeam& team, const Formula& phi);

/// Repeated team queries against one model, sharing cached subresults.
/// The model and every queried formula must outlive the checker.
class ModelChecker {
 public:
  explicit ModelChecker(const KripkeModel& model, EvalOptions options = {});
  ~ModelChecker();
  ModelChecker(ModelChecker&&) noexcept;
  ModelChecker& operator=(ModelChecker&&) noexcept;

  bool satisfies(const WorldTeam& team, const Formula& phi);
  /// Team given as a bit mask over worlds; requires model.size() <= 64.
  bool satisfies_mask(std::uint64_t team, const Formula& phi);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace teamtab
