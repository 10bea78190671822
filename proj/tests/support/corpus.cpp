#include "corpus.hpp"

#include <algorithm>

namespace teamtab::testing {

namespace {

const std::vector<std::string> kProps = {"p", "q"};

std::vector<Formula> literals() {
  return {Formula::atom("p"), Formula::neg_atom("p"), Formula::atom("q"), Formula::neg_atom("q")};
}

// by_size[s] = all formulas of size s.
std::vector<Formula> grow(std::size_t max_size, const std::vector<std::vector<Formula>>& leaves,
                          bool with_idis) {
  std::vector<std::vector<Formula>> by_size(max_size + 1);
  for (std::size_t s = 1; s <= max_size; ++s) {
    if (s < leaves.size()) by_size[s] = leaves[s];
    for (std::size_t l = 1; l + 2 <= s; ++l) {
      const std::size_t r = s - 1 - l;
      for (const Formula& a : by_size[l]) {
        for (const Formula& b : by_size[r]) {
          by_size[s].push_back(Formula::conj(a, b));
          by_size[s].push_back(Formula::disj(a, b));
          if (with_idis) by_size[s].push_back(Formula::idis(a, b));
        }
      }
    }
  }
  std::vector<Formula> out;
  for (auto& bucket : by_size) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

}  // namespace

std::vector<Formula> exhaustive_pd(std::size_t max_size) {
  std::vector<std::vector<Formula>> leaves(5);
  leaves[1] = literals();
  for (const auto& c : kProps) leaves[2].push_back(Formula::dep({}, Formula::atom(c)));
  for (const auto& a : kProps) {
    for (const auto& c : kProps) leaves[3].push_back(Formula::dep({Formula::atom(a)}, Formula::atom(c)));
  }
  for (const auto& a : kProps) {
    for (const auto& b : kProps) {
      for (const auto& c : kProps) {
        leaves[4].push_back(Formula::dep({Formula::atom(a), Formula::atom(b)}, Formula::atom(c)));
      }
    }
  }
  return grow(max_size, leaves, false);
}

std::vector<Formula> exhaustive_plv(std::size_t max_size) {
  std::vector<std::vector<Formula>> leaves(2);
  leaves[1] = literals();
  return grow(max_size, leaves, true);
}

namespace {

Formula random_literal(std::mt19937_64& rng) {
  const auto lits = literals();
  return lits[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Formula random_dep(std::mt19937_64& rng, ModalFamily family) {
  const std::size_t arity = std::uniform_int_distribution<std::size_t>(0, 1)(rng);
  std::vector<Formula> args;
  auto argument = [&]() -> Formula {
    if (family == ModalFamily::EMDL && coin(rng, 0.7)) return random_ml(rng, 1, 3);
    return Formula::atom(kProps[std::uniform_int_distribution<std::size_t>(0, 1)(rng)]);
  };
  for (std::size_t i = 0; i < arity; ++i) args.push_back(argument());
  return Formula::dep(std::move(args), argument());
}

Formula random_tree(std::mt19937_64& rng, ModalFamily family, std::size_t depth, std::size_t budget) {
  const double leaf_bias = budget <= 1 ? 1.0 : 0.25;
  if (coin(rng, leaf_bias)) {
    if (family != ModalFamily::MLIDIS && coin(rng, 0.3)) return random_dep(rng, family);
    return random_literal(rng);
  }
  const int pick = std::uniform_int_distribution<int>(0, 5)(rng);
  if ((pick == 4 || pick == 5) && depth > 0) {
    Formula inner = random_tree(rng, family, depth - 1, budget - 1);
    return pick == 4 ? Formula::diamond(std::move(inner)) : Formula::box(std::move(inner));
  }
  const std::size_t left = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, budget - 2))(rng);
  Formula a = random_tree(rng, family, depth, left);
  Formula b = random_tree(rng, family, depth, std::max<std::size_t>(1, budget - 1 - left));
  if (pick == 0 || pick == 4) return Formula::conj(std::move(a), std::move(b));
  if (pick == 1 || pick == 5) return Formula::disj(std::move(a), std::move(b));
  if (family == ModalFamily::MLIDIS) return Formula::idis(std::move(a), std::move(b));
  return coin(rng, 0.5) ? Formula::conj(std::move(a), std::move(b)) : Formula::disj(std::move(a), std::move(b));
}

}  // namespace

Formula random_ml(std::mt19937_64& rng, std::size_t max_depth, std::size_t budget) {
  if (budget <= 1 || coin(rng, 0.3)) return random_literal(rng);
  const int pick = std::uniform_int_distribution<int>(0, 3)(rng);
  if (pick >= 2 && max_depth > 0) {
    Formula inner = random_ml(rng, max_depth - 1, budget - 1);
    return pick == 2 ? Formula::diamond(std::move(inner)) : Formula::box(std::move(inner));
  }
  const std::size_t left = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, budget - 2))(rng);
  Formula a = random_ml(rng, max_depth, left);
  Formula b = random_ml(rng, max_depth, std::max<std::size_t>(1, budget - 1 - left));
  return pick % 2 == 0 ? Formula::conj(std::move(a), std::move(b)) : Formula::disj(std::move(a), std::move(b));
}

Formula random_modal(std::mt19937_64& rng, ModalFamily family) {
  const LogicId wanted = family == ModalFamily::MLIDIS ? LogicId::MLIDIS
                         : family == ModalFamily::MDL  ? LogicId::MDL
                                                       : LogicId::EMDL;
  while (true) {
    const std::size_t budget = std::uniform_int_distribution<std::size_t>(3, 9)(rng);
    Formula phi = random_tree(rng, family, 2, budget);
    if (vr(phi) > 2 || modal_depth(phi) > 2 || !(phi.features() & detail::kHasModal)) continue;
    if (classify(phi) != wanted) continue;
    return phi;
  }
}

ModalCountermodel random_model(std::mt19937_64& rng, std::size_t max_worlds, std::size_t max_team) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_worlds)(rng);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
  KripkeModel model(std::move(names));
  for (World a = 0; a < n; ++a) {
    for (World b = 0; b < n; ++b) {
      if (coin(rng, 0.4)) model.add_edge(a, b);
    }
  }
  for (const auto& p : kProps) {
    model.declare(p);
    for (World w = 0; w < n; ++w) {
      if (coin(rng, 0.5)) model.set_true(p, w);
    }
  }
  WorldTeam team;
  for (World w = 0; w < n && team.size() < max_team; ++w) {
    if (coin(rng, 0.6)) team.insert(w);
  }
  return {std::move(model), std::move(team)};
}

std::vector<KripkeModel> all_models(std::size_t n) {
  std::vector<KripkeModel> out;
  const std::size_t edges = n * n;
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << edges); ++r) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << (2 * n)); ++v) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
      KripkeModel m(std::move(names));
      for (std::size_t i = 0; i < edges; ++i) {
        if ((r >> i) & 1) m.add_edge(i / n, i % n);
      }
      for (std::size_t p = 0; p < 2; ++p) {
        m.declare(kProps[p]);
        for (std::size_t w = 0; w < n; ++w) {
          if ((v >> (p * n + w)) & 1) m.set_true(kProps[p], w);
        }
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

KripkeModel full_pq_model() { return embed(PropTeam::full(kProps)); }

}  // namespace teamtab::testing
