#include "teamtab/formula.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <limits>
#include <set>

#include "teamtab/error.hpp"

namespace teamtab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllFormed: return "IllFormed";
    case ErrorCode::Undualizable: return "Undualizable";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::WrongLogic: return "WrongLogic";
    case ErrorCode::ForeignWorld: return "ForeignWorld";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotSaturated: return "NotSaturated";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Internal: return "InternalError";
  }
  return "?";
}

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula Formula::make(Kind kind, std::string name, std::vector<Formula> children) {
  auto node = std::make_shared<detail::Node>();
  node->kind = kind;
  node->name = std::move(name);
  node->children = std::move(children);

  std::size_t h = mix(0, static_cast<std::size_t>(kind));
  h = mix(h, std::hash<std::string>{}(node->name));
  std::uint8_t features = 0;
  for (const Formula& c : node->children) {
    h = mix(h, c.hash());
    features |= c.features();
  }
  switch (kind) {
    case Kind::IDis: features |= detail::kHasIDis; break;
    case Kind::Diamond:
    case Kind::Box: features |= detail::kHasModal; break;
    case Kind::Dep:
      features |= detail::kHasDep;
      for (const Formula& c : node->children) {
        if (!c.is_flat()) features |= detail::kBadDepArg;
        if (c.kind() != Kind::Atom) features |= detail::kNonAtomicDepArg;
      }
      break;
    default: break;
  }
  node->features = features;
  node->hash = h;
  return Formula(std::move(node));
}

Formula Formula::atom(std::string name) { return make(Kind::Atom, std::move(name), {}); }
Formula Formula::neg_atom(std::string name) { return make(Kind::NegAtom, std::move(name), {}); }
Formula Formula::conj(Formula l, Formula r) { return make(Kind::And, {}, {std::move(l), std::move(r)}); }
Formula Formula::disj(Formula l, Formula r) { return make(Kind::Or, {}, {std::move(l), std::move(r)}); }
Formula Formula::idis(Formula l, Formula r) { return make(Kind::IDis, {}, {std::move(l), std::move(r)}); }
Formula Formula::diamond(Formula inner) { return make(Kind::Diamond, {}, {std::move(inner)}); }
Formula Formula::box(Formula inner) { return make(Kind::Box, {}, {std::move(inner)}); }

Formula Formula::dep(std::vector<Formula> antecedents, Formula consequent) {
  antecedents.push_back(std::move(consequent));
  return make(Kind::Dep, {}, std::move(antecedents));
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.name() != b.name()) return false;
  const auto ac = a.children();
  const auto bc = b.children();
  return std::equal(ac.begin(), ac.end(), bc.begin(), bc.end());
}

// ---------------------------------------------------------------------------
// Logics

std::string_view to_string(LogicId logic) {
  switch (logic) {
    case LogicId::PL: return "PL";
    case LogicId::PLIDIS: return "PL(v)";
    case LogicId::PD: return "PD";
    case LogicId::ML: return "ML";
    case LogicId::MLIDIS: return "ML(v)";
    case LogicId::MDL: return "MDL";
    case LogicId::EMDL: return "EMDL";
  }
  return "?";
}

std::optional<LogicId> logic_from_string(std::string_view text) {
  static const std::pair<std::string_view, LogicId> table[] = {
      {"pl", LogicId::PL},   {"plv", LogicId::PLIDIS},  {"pd", LogicId::PD},
      {"ml", LogicId::ML},   {"mlv", LogicId::MLIDIS},  {"mdl", LogicId::MDL},
      {"emdl", LogicId::EMDL},
  };
  for (const auto& [key, id] : table) {
    if (key == text) return id;
  }
  return std::nullopt;
}

bool includes(LogicId outer, LogicId inner) {
  if (outer == inner) return true;
  switch (inner) {
    case LogicId::PL: return true;
    case LogicId::PLIDIS: return outer == LogicId::MLIDIS;
    case LogicId::PD: return outer == LogicId::MDL || outer == LogicId::EMDL;
    case LogicId::ML: return outer == LogicId::MLIDIS || outer == LogicId::MDL || outer == LogicId::EMDL;
    case LogicId::MDL: return outer == LogicId::EMDL;
    case LogicId::MLIDIS:
    case LogicId::EMDL: return false;
  }
  return false;
}

bool is_modal(LogicId logic) {
  return logic == LogicId::ML || logic == LogicId::MLIDIS || logic == LogicId::MDL ||
         logic == LogicId::EMDL;
}

LogicId classify(const Formula& phi) {
  const std::uint8_t f = phi.features();
  if (f & detail::kBadDepArg) {
    throw Error(ErrorCode::IllFormed, "dependence atom argument contains a dependence atom or '||'");
  }
  const bool modal = f & detail::kHasModal;
  const bool has_idis = f & detail::kHasIDis;
  const bool has_dep = f & detail::kHasDep;
  if (has_idis && has_dep) {
    throw Error(ErrorCode::IllFormed, "no supported logic combines '||' with dependence atoms");
  }
  if (has_idis) return modal ? LogicId::MLIDIS : LogicId::PLIDIS;
  if (has_dep) {
    if (f & detail::kNonAtomicDepArg) return LogicId::EMDL;
    return modal ? LogicId::MDL : LogicId::PD;
  }
  return modal ? LogicId::ML : LogicId::PL;
}

// ---------------------------------------------------------------------------
// Syntactic operations

Formula dual(const Formula& phi) {
  switch (phi.kind()) {
    case Kind::Atom: return Formula::neg_atom(phi.name());
    case Kind::NegAtom: return Formula::atom(phi.name());
    case Kind::And: return Formula::disj(dual(phi.left()), dual(phi.right()));
    case Kind::Or: return Formula::conj(dual(phi.left()), dual(phi.right()));
    case Kind::Diamond: return Formula::box(dual(phi.inner()));
    case Kind::Box: return Formula::diamond(dual(phi.inner()));
    case Kind::IDis:
    case Kind::Dep: break;
  }
  throw Error(ErrorCode::Undualizable, "dual is defined only for PL and ML formulas");
}

Formula polarize(const Formula& phi, bool top) { return top ? phi : dual(phi); }

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                          : a + b;
}

}  // namespace

std::uint64_t vr(const Formula& phi) {
  if (phi.is_flat()) return 0;
  std::uint64_t total = 0;
  if (phi.kind() == Kind::IDis) total = 1;
  if (phi.kind() == Kind::Dep) {
    const std::size_t n = phi.antecedents().size();
    return n >= 64 ? std::numeric_limits<std::uint64_t>::max() : std::uint64_t{1} << n;
  }
  for (const Formula& c : phi.children()) total = sat_add(total, vr(c));
  return total;
}

std::size_t size(const Formula& phi) {
  if (phi.is_literal()) return 1;
  std::size_t total = 1;
  for (const Formula& c : phi.children()) total += size(c);
  return total;
}

std::size_t modal_depth(const Formula& phi) {
  std::size_t deepest = 0;
  for (const Formula& c : phi.children()) deepest = std::max(deepest, modal_depth(c));
  if (phi.kind() == Kind::Diamond || phi.kind() == Kind::Box) ++deepest;
  return deepest;
}

namespace {

void collect_props(const Formula& phi, std::set<std::string>& out) {
  if (phi.is_literal()) {
    out.insert(phi.name());
    return;
  }
  for (const Formula& c : phi.children()) collect_props(c, out);
}

}  // namespace

std::vector<std::string> propositions(const Formula& phi) {
  std::set<std::string> props;
  collect_props(phi, props);
  return {props.begin(), props.end()};
}

Formula big_conj(std::span<const Formula> parts) {
  assert(!parts.empty());
  Formula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Formula::conj(parts[i], acc);
  return acc;
}

Formula big_disj(std::span<const Formula> parts) {
  assert(!parts.empty());
  Formula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Formula::disj(parts[i], acc);
  return acc;
}

std::vector<std::vector<bool>> truth_tuples(std::size_t n) {
  if (n >= 32) throw Error(ErrorCode::ResourceLimit, "dependence atom has too many antecedents");
  std::vector<std::vector<bool>> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::vector<bool> tuple(n);
    for (std::size_t j = 0; j < n; ++j) tuple[j] = ((k >> (n - 1 - j)) & 1) == 0;
    out.push_back(std::move(tuple));
  }
  return out;
}

Formula dep_expansion(const Formula& dep_atom) {
  assert(dep_atom.kind() == Kind::Dep);
  const auto args = dep_atom.antecedents();
  const Formula& psi = dep_atom.consequent();
  const Formula either = Formula::idis(psi, dual(psi));
  std::vector<Formula> disjuncts;
  for (const auto& tuple : truth_tuples(args.size())) {
    std::vector<Formula> conjuncts;
    for (std::size_t j = 0; j < args.size(); ++j) conjuncts.push_back(polarize(args[j], tuple[j]));
    conjuncts.push_back(either);
    disjuncts.push_back(big_conj(conjuncts));
  }
  return big_disj(disjuncts);
}

Formula eliminate_dep(const Formula& phi) {
  if (!(phi.features() & detail::kHasDep)) return phi;
  switch (phi.kind()) {
    case Kind::Dep: return dep_expansion(phi);
    case Kind::And: return Formula::conj(eliminate_dep(phi.left()), eliminate_dep(phi.right()));
    case Kind::Or: return Formula::disj(eliminate_dep(phi.left()), eliminate_dep(phi.right()));
    case Kind::IDis: return Formula::idis(eliminate_dep(phi.left()), eliminate_dep(phi.right()));
    case Kind::Diamond: return Formula::diamond(eliminate_dep(phi.inner()));
    case Kind::Box: return Formula::box(eliminate_dep(phi.inner()));
    default: return phi;
  }
}

// ---------------------------------------------------------------------------
// Paths and selections

const Formula& subformula_at(const Formula& phi, std::span<const std::uint32_t> path) {
  const Formula* node = &phi;
  for (std::uint32_t step : path) {
    const auto kids = node->children();
    if (step >= kids.size()) throw Error(ErrorCode::BadPath, "occurrence path leaves the formula");
    node = &kids[step];
  }
  return *node;
}

namespace {

Formula rebuild_with_child(const Formula& phi, std::uint32_t index, Formula child) {
  switch (phi.kind()) {
    case Kind::And:
      return index == 0 ? Formula::conj(std::move(child), phi.right()) : Formula::conj(phi.left(), std::move(child));
    case Kind::Or:
      return index == 0 ? Formula::disj(std::move(child), phi.right()) : Formula::disj(phi.left(), std::move(child));
    case Kind::IDis:
      return index == 0 ? Formula::idis(std::move(child), phi.right()) : Formula::idis(phi.left(), std::move(child));
    case Kind::Diamond: return Formula::diamond(std::move(child));
    case Kind::Box: return Formula::box(std::move(child));
    case Kind::Dep: {
      std::vector<Formula> args(phi.children().begin(), phi.children().end());
      args[index] = std::move(child);
      Formula consequent = args.back();
      args.pop_back();
      return Formula::dep(std::move(args), std::move(consequent));
    }
    default: break;
  }
  throw Error(ErrorCode::BadPath, "occurrence path leaves the formula");
}

}  // namespace

Formula replace_at(const Formula& phi, std::span<const std::uint32_t> path, const Formula& replacement) {
  if (path.empty()) return replacement;
  if (path.front() >= phi.children().size()) {
    throw Error(ErrorCode::BadPath, "occurrence path leaves the formula");
  }
  Formula child = replace_at(phi.children()[path.front()], path.subspan(1), replacement);
  return rebuild_with_child(phi, path.front(), std::move(child));
}

namespace {

void collect_idis(const Formula& phi, Path& prefix, std::vector<Path>& out) {
  if (!(phi.features() & detail::kHasIDis)) return;
  if (phi.kind() == Kind::IDis) out.push_back(prefix);
  const auto kids = phi.children();
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    prefix.push_back(i);
    collect_idis(kids[i], prefix, out);
    prefix.pop_back();
  }
}

Formula select(const Formula& phi, Path& prefix, const Selection& f) {
  if (!(phi.features() & detail::kHasIDis)) return phi;
  if (phi.kind() == Kind::IDis) {
    const Side side = f.choice.at(prefix);
    const std::uint32_t index = side == Side::Left ? 0 : 1;
    prefix.push_back(index);
    Formula chosen = select(phi.children()[index], prefix, f);
    prefix.pop_back();
    return chosen;
  }
  Formula out = phi;
  const auto kids = phi.children();
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    prefix.push_back(i);
    Formula child = select(kids[i], prefix, f);
    prefix.pop_back();
    if (!(child == kids[i])) out = rebuild_with_child(out, i, std::move(child));
  }
  return out;
}

}  // namespace

std::vector<Path> idis_occurrences(const Formula& phi) {
  std::vector<Path> out;
  Path prefix;
  collect_idis(phi, prefix, out);
  return out;
}

std::vector<Selection> enumerate_selections(const Formula& phi) {
  const auto occurrences = idis_occurrences(phi);
  if (occurrences.size() >= 32) {
    throw Error(ErrorCode::ResourceLimit, "too many '||' occurrences to enumerate selections");
  }
  const std::uint64_t count = std::uint64_t{1} << occurrences.size();
  std::vector<Selection> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Selection f;
    for (std::size_t i = 0; i < occurrences.size(); ++i) {
      f.choice.emplace(occurrences[i], ((k >> i) & 1) ? Side::Right : Side::Left);
    }
    out.push_back(std::move(f));
  }
  return out;
}

Formula apply_selection(const Formula& phi, const Selection& f) {
  const auto occurrences = idis_occurrences(phi);
  bool matches = occurrences.size() == f.choice.size();
  for (std::size_t i = 0; matches && i < occurrences.size(); ++i) {
    matches = f.choice.contains(occurrences[i]);
  }
  if (!matches) {
    throw Error(ErrorCode::DomainMismatch, "selection domain differs from the '||' occurrences");
  }
  Path prefix;
  return select(phi, prefix, f);
}

}  // namespace teamtab
