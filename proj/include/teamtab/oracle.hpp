#pragma once

// Brute-force semantic procedures used as ground truth for the prover.

#include <cstdint>
#include <optional>

#include "teamtab/semantics.hpp"

namespace teamtab {

/// {0,1}^D ⊨ φ with D the propositions of φ. Throws WrongLogic on modal input.
bool valid_prop(const Formula& phi);

/// A ⊆-minimal falsifying subteam of {0,1}^D, or nullopt when φ is valid.
/// Teams are tried by increasing cardinality.
std::optional<PropTeam> search_prop_countermodel(const Formula& phi);

inline constexpr std::uint64_t kDefaultSearchBudget = 10'000'000;

/// Bounded search over models with at most max_worlds worlds (one model per
/// isomorphism class of the lexicographically least encoding) and nonempty
/// teams of size ≤ 2^vr(φ). nullopt is NOT a validity certificate.
/// Throws ResourceLimit once `budget` team evaluations are exceeded.
std::optional<ModalCountermodel> search_modal_countermodel(const Formula& phi, std::size_t max_worlds,
                                                           std::uint64_t budget = kDefaultSearchBudget);

/// [K,T ⊨ φ] ⟺ [K,T' ⊨ φ for all T' ⊆ T with |T'| ≤ 2^vr(φ)].
bool coherence_check(const KripkeModel& model, const WorldTeam& team, const Formula& phi);

}  // namespace teamtab
