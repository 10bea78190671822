#pragma once

// Formulas in negation normal form for PL, PL(⊻), PD, ML, ML(⊻), MDL and
// EMDL, plus the syntactic operations shared by every other module.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teamtab {

enum class Kind : std::uint8_t { Atom, NegAtom, And, Or, IDis, Dep, Diamond, Box };

class Formula;

namespace detail {

enum Feature : std::uint8_t {
  kHasIDis = 1 << 0,
  kHasDep = 1 << 1,
  kHasModal = 1 << 2,
  kNonAtomicDepArg = 1 << 3,
  kBadDepArg = 1 << 4,  // a dep argument contains ⊻ or another dep atom
};

struct Node;

}  // namespace detail

/// Immutable, structurally shared formula tree. Copies are cheap.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula neg_atom(std::string name);
  static Formula conj(Formula left, Formula right);
  static Formula disj(Formula left, Formula right);
  static Formula idis(Formula left, Formula right);
  /// Dependence atom =(a1,...,an,consequent); n may be zero.
  static Formula dep(std::vector<Formula> antecedents, Formula consequent);
  static Formula diamond(Formula inner);
  static Formula box(Formula inner);

  Kind kind() const;
  const std::string& name() const;
  const Formula& left() const;
  const Formula& right() const;
  const Formula& inner() const;
  std::span<const Formula> antecedents() const;
  const Formula& consequent() const;
  /// Binary: left, right. Unary: inner. Dep: antecedents then consequent.
  std::span<const Formula> children() const;

  bool is_literal() const { return kind() == Kind::Atom || kind() == Kind::NegAtom; }
  /// No ⊻ and no dependence atom: a PL or ML formula, hence flat.
  bool is_flat() const;
  std::uint8_t features() const;
  std::size_t hash() const;
  /// Stable node address, usable as a cache key while the formula is alive.
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  static Formula make(Kind kind, std::string name, std::vector<Formula> children);

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct Node {
  Kind kind;
  std::uint8_t features = 0;
  std::string name;
  std::vector<Formula> children;
  std::size_t hash = 0;
};

}  // namespace detail

inline Kind Formula::kind() const { return node_->kind; }
inline std::uint8_t Formula::features() const { return node_->features; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline bool Formula::is_flat() const {
  return (node_->features & (detail::kHasIDis | detail::kHasDep)) == 0;
}
inline std::span<const Formula> Formula::children() const { return node_->children; }
inline const std::string& Formula::name() const { return node_->name; }
inline const Formula& Formula::left() const { return node_->children.front(); }
inline const Formula& Formula::right() const { return node_->children.back(); }
inline const Formula& Formula::inner() const { return node_->children.front(); }
inline const Formula& Formula::consequent() const { return node_->children.back(); }
inline std::span<const Formula> Formula::antecedents() const {
  return std::span<const Formula>(node_->children).first(node_->children.size() - 1);
}

/// The seven logics, ordered by grammar inclusion (see includes()).
enum class LogicId : std::uint8_t { PL, PLIDIS, PD, ML, MLIDIS, MDL, EMDL };

std::string_view to_string(LogicId logic);
std::optional<LogicId> logic_from_string(std::string_view text);
/// True iff every formula of `inner` is a formula of `outer`.
bool includes(LogicId outer, LogicId inner);
bool is_modal(LogicId logic);

/// Least logic whose grammar generates φ. Throws IllFormed when a dependence
/// atom has a ⊻ or dependence atom inside an argument, or when φ mixes ⊻ with
/// dependence atoms (no logic here admits both).
LogicId classify(const Formula& phi);

/// φ^⊥ for PL/ML formulas. Throws Undualizable on ⊻ or dependence atoms.
Formula dual(const Formula& phi);
/// φ^⊤ = φ, φ^⊥ = dual(φ).
Formula polarize(const Formula& phi, bool top);

/// Number of ⊻ after expanding dependence atoms; saturates at UINT64_MAX.
std::uint64_t vr(const Formula& phi);
/// Symbol count excluding negations and brackets.
std::size_t size(const Formula& phi);
std::size_t modal_depth(const Formula& phi);
/// Sorted, duplicate-free proposition names.
std::vector<std::string> propositions(const Formula& phi);

/// Right-nested conjunction/disjunction; the input must be non-empty.
Formula big_conj(std::span<const Formula> parts);
Formula big_disj(std::span<const Formula> parts);

/// Truth-value tuples ā ∈ {⊤,⊥}^n in lexicographic order with ⊤ < ⊥
/// (true stands for ⊤).
std::vector<std::vector<bool>> truth_tuples(std::size_t n);

/// Replaces every dependence atom =(φ1..φn,ψ) by
/// ⋁_ā ⋀{φ1^a1, ..., φn^an, ψ ⊻ ψ^⊥}.
Formula eliminate_dep(const Formula& phi);
/// The expansion of a single dependence atom used by eliminate_dep.
Formula dep_expansion(const Formula& dep_atom);

// Occurrence paths: each step is a child index as in Formula::children().
using Path = std::vector<std::uint32_t>;

/// Throws BadPath when the path leaves the tree.
const Formula& subformula_at(const Formula& phi, std::span<const std::uint32_t> path);
Formula replace_at(const Formula& phi, std::span<const std::uint32_t> path,
                   const Formula& replacement);

enum class Side : std::uint8_t { Left, Right };

/// A ⊻-selection function keyed by occurrence path.
struct Selection {
  std::map<Path, Side> choice;
  friend bool operator==(const Selection&, const Selection&) = default;
};

/// ⊻ occurrences in preorder.
std::vector<Path> idis_occurrences(const Formula& phi);
/// All 2^k selection functions; the i-th occurrence is bit i of a counter,
/// 0 meaning Left.
std::vector<Selection> enumerate_selections(const Formula& phi);
/// φ^f. Throws DomainMismatch unless f's domain is exactly the ⊻ occurrences.
Formula apply_selection(const Formula& phi, const Selection& f);

}  // namespace teamtab

template <>
struct std::hash<teamtab::Formula> {
  std::size_t operator()(const teamtab::Formula& f) const noexcept { return f.hash(); }
};
