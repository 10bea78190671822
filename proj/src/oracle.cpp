#include "teamtab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "teamtab/error.hpp"

namespace teamtab {

namespace {

void require_propositional(const Formula& phi) {
  classify(phi);
  if (phi.features() & detail::kHasModal) {
    throw Error(ErrorCode::WrongLogic, "the propositional oracle needs a PL, PL(v) or PD formula");
  }
}

PropTeam full_team(const Formula& phi) {
  auto props = propositions(phi);
  if (props.size() > 16) throw Error(ErrorCode::ResourceLimit, "more than 16 propositions");
  return PropTeam::full(std::move(props));
}

// Calls f on every k-subset of {0..n-1} in lexicographic order until f returns true.
template <class F>
bool any_combination(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return false;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (f(pick)) return true;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

std::uint64_t team_bound(const Formula& phi) {
  const std::uint64_t v = vr(phi);
  return v >= 63 ? UINT64_MAX : std::uint64_t{1} << v;
}

// Models over n worlds: relation as an n*n bit mask (bit i*n+j for iRj) and
// valuation as a k*n mask (bit p*n+w for w ∈ V(p)).
struct Code {
  std::uint64_t relation;
  std::uint64_t valuation;
  auto operator<=>(const Code&) const = default;
};

Code permute(const Code& c, const std::vector<std::size_t>& perm, std::size_t n, std::size_t k) {
  Code out{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if ((c.relation >> (i * n + j)) & 1) out.relation |= std::uint64_t{1} << (perm[i] * n + perm[j]);
    }
  }
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t w = 0; w < n; ++w) {
      if ((c.valuation >> (p * n + w)) & 1) out.valuation |= std::uint64_t{1} << (p * n + perm[w]);
    }
  }
  return out;
}

bool is_canonical(const Code& c, std::size_t n, std::size_t k) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end())) {
    if (permute(c, perm, n, k) < c) return false;
  }
  return true;
}

}  // namespace

bool valid_prop(const Formula& phi) {
  require_propositional(phi);
  return satisfies_prop(full_team(phi), phi);
}

std::optional<PropTeam> search_prop_countermodel(const Formula& phi) {
  require_propositional(phi);
  const PropTeam full = full_team(phi);
  const KripkeModel model = embed(full);
  ModelChecker checker(model);
  WorldTeam all;
  for (World w = 0; w < model.size(); ++w) all.insert(w);
  if (checker.satisfies(all, phi)) return std::nullopt;

  const std::vector<std::vector<bool>> rows(full.rows().begin(), full.rows().end());
  std::optional<PropTeam> found;
  for (std::size_t k = 1; k <= rows.size() && !found; ++k) {
    any_combination(rows.size(), k, [&](const std::vector<std::size_t>& pick) {
      const WorldTeam team(pick.begin(), pick.end());
      if (checker.satisfies(team, phi)) return false;
      PropTeam out(full.domain());
      for (std::size_t i : pick) out.insert_row(rows[i]);
      found = std::move(out);
      return true;
    });
  }
  if (!found) throw Error(ErrorCode::Internal, "full team falsifies but no subteam does");
  return found;
}

std::optional<ModalCountermodel> search_modal_countermodel(const Formula& phi, std::size_t max_worlds,
                                                           std::uint64_t budget) {
  classify(phi);
  if (max_worlds == 0) throw Error(ErrorCode::InvalidInput, "max_worlds must be at least 1");
  const auto props = propositions(phi);
  const std::size_t k = props.size();
  const std::uint64_t bound = team_bound(phi);
  std::uint64_t spent = 0;

  for (std::size_t n = 1; n <= max_worlds; ++n) {
    if (n * n > 63 || n * k > 63) throw Error(ErrorCode::ResourceLimit, "model enumeration too large");
    const std::uint64_t relations = std::uint64_t{1} << (n * n);
    const std::uint64_t valuations = std::uint64_t{1} << (n * k);
    for (std::uint64_t r = 0; r < relations; ++r) {
      for (std::uint64_t v = 0; v < valuations; ++v) {
        if (!is_canonical({r, v}, n, k)) continue;
        std::vector<std::string> names;
        for (std::size_t w = 0; w < n; ++w) names.push_back("w" + std::to_string(w));
        KripkeModel model(std::move(names));
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if ((r >> (i * n + j)) & 1) model.add_edge(i, j);
          }
        }
        for (std::size_t p = 0; p < k; ++p) {
          model.declare(props[p]);
          for (std::size_t w = 0; w < n; ++w) {
            if ((v >> (p * n + w)) & 1) model.set_true(props[p], w);
          }
        }
        ModelChecker checker(model);
        for (std::uint64_t t = 1; t < (std::uint64_t{1} << n); ++t) {
          if (static_cast<std::uint64_t>(std::popcount(t)) > bound) continue;
          if (++spent > budget) {
            throw Error(ErrorCode::ResourceLimit,
                        "countermodel search budget of " + std::to_string(budget) + " evaluations exceeded");
          }
          if (checker.satisfies_mask(t, phi)) continue;
          WorldTeam team;
          for (World w = 0; w < n; ++w) {
            if ((t >> w) & 1) team.insert(w);
          }
          if (satisfies_modal(model, team, phi, EvalOptions{false})) {
            throw Error(ErrorCode::Internal, "countermodel failed re-verification");
          }
          return ModalCountermodel{std::move(model), std::move(team)};
        }
      }
    }
  }
  return std::nullopt;
}

bool coherence_check(const KripkeModel& model, const WorldTeam& team, const Formula& phi) {
  ModelChecker checker(model);
  const bool whole = checker.satisfies(team, phi);
  const std::vector<World> members(team.begin(), team.end());
  const std::uint64_t bound = std::min<std::uint64_t>(team_bound(phi), members.size());
  bool small_all = true;
  for (std::size_t k = 0; k <= bound && small_all; ++k) {
    any_combination(members.size(), k, [&](const std::vector<std::size_t>& pick) {
      WorldTeam sub;
      for (std::size_t i : pick) sub.insert(members[i]);
      if (!checker.satisfies(sub, phi)) small_all = false;
      return !small_all;
    });
  }
  return whole == small_all;
}

}  // namespace teamtab
