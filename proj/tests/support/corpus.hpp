#pragma once

// Formula and model corpora shared by the unit and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "teamtab/formula.hpp"
#include "teamtab/semantics.hpp"

namespace teamtab::testing {

/// Every formula over {p,q} built from literals, ∧, ∨ and dependence atoms
/// with at most two antecedents, up to the given size.
std::vector<Formula> exhaustive_pd(std::size_t max_size = 7);

/// Every formula over {p,q} built from literals, ∧, ∨ and ⊻, up to the given size.
std::vector<Formula> exhaustive_plv(std::size_t max_size = 7);

enum class ModalFamily { MLIDIS, MDL, EMDL };

/// Random formula of the family over {p,q}: modal depth ≤ 2, vr ≤ 2.
Formula random_modal(std::mt19937_64& rng, ModalFamily family);

/// Random ML formula over {p,q} with modal depth ≤ max_depth.
Formula random_ml(std::mt19937_64& rng, std::size_t max_depth, std::size_t budget);

/// Random model over {p,q} with 1..max_worlds worlds plus a team of at most max_team worlds.
ModalCountermodel random_model(std::mt19937_64& rng, std::size_t max_worlds, std::size_t max_team);

/// All models over {p,q} with exactly n worlds (2^(n*n+2n) of them).
std::vector<KripkeModel> all_models(std::size_t n);

/// {0,1}^{p,q} embedded as four worlds; world order follows PropTeam rows.
KripkeModel full_pq_model();

inline constexpr std::uint64_t kCorpusSeed = 20240611;

}  // namespace teamtab::testing
