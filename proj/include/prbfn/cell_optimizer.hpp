#pragma once

#include <cstdint>
#include <vector>

#include "prbfn/cascade_synth.hpp"
#include "prbfn/pixel_network.hpp"

namespace prbfn {

// Weights and thresholds of the per-state unit-cell objective: amplitude and
// phase match terms weighted by c1, c2; matching / isolation / loss
// constraints handled by exact penalty and reported as margins.
struct CellObjective {
    double c1 = 1.0;
    double c2 = 0.5;
    double t_s_db = -10.0;   // worst allowed reflection
    double t_m_db = -15.0;   // worst allowed output coupling
    double t_loss = 0.37;    // max allowed 1 - G3 (linear power)
    std::vector<std::size_t> freq_indices;  // evaluation grid; empty = all points
};

struct ConstraintMargins {
    double matching_db = 0.0;   // t_s - worst reflection,      >= 0 satisfied
    double isolation_db = 0.0;  // t_m - worst |S23|,           >= 0 satisfied
    double loss = 0.0;          // t_loss - worst (1 - G3),     >= 0 satisfied

    bool feasible() const { return matching_db >= 0.0 && isolation_db >= 0.0 && loss >= 0.0; }
};

// Evaluation record of one switch state against one unit-state target.
// g1/g2/g3 are taken at the frequency maximizing the weighted match error;
// margins are worst-case over the whole evaluation grid.
struct StateEval {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double weighted = 0.0;   // max over grid of c1*G1 + c2*G2
    double penalized = 0.0;  // weighted + kPenaltyWeight * constraint violations
    std::size_t worst_freq_index = 0;
    ConstraintMargins margins;
};

inline constexpr double kPenaltyWeight = 1e3;

struct SearchedState {
    SwitchState x;
    StateEval eval;
    bool feasible = false;
};

struct StateSet {
    std::vector<SearchedState> states;
};

enum class SearchMethod { Exhaustive, Annealing, Genetic };

struct SearchOptions {
    SearchMethod method = SearchMethod::Annealing;
    long long budget = 20000;  // objective evaluations per state (stochastic methods)
    std::uint64_t seed = 1;
    // When design_half is set, only states 1..ceil(N/2) are searched; the
    // rest are obtained by mirroring through mirror_perm and re-evaluated
    // against their own targets.
    bool design_half = false;
    std::vector<int> mirror_perm;
};

// Amplitude/phase match of the reduced cell against a unit-state target per
// the design objective: G1 compares normalized output magnitudes, G2 the
// wrapped phase difference, G3 is the transmitted power |S21|^2 + |S31|^2.
StateEval eval_state(const PixelNetwork& net, const SwitchState& x, const SwitchModel& sw,
                     const UnitStateTarget& target, const CellObjective& obj);

// Per-state minimization of the penalized min-max objective. Exhaustive
// search requires q <= 20; annealing and genetic are seeded and
// deterministic. Infeasible states are returned best-found with
// feasible = false.
StateSet search_states(const PixelNetwork& net, const SwitchModel& sw,
                       const std::vector<UnitStateTarget>& targets, const CellObjective& obj,
                       const SearchOptions& opts);

// Bits permuted by an involution (validated).
SwitchState mirror_state(const SwitchState& x, const std::vector<int>& perm);

// Swaps the first two groups of group_len switch indices, fixes the rest.
std::vector<int> group_swap_permutation(int q, int group_len);

struct PruneReport {
    std::vector<int> removable_open;     // 0-based switch indices off in every state
    std::vector<int> replace_with_wire;  // on in every state; re-verification is the caller's job
};
PruneReport prune_switches(const StateSet& states);

}  // namespace prbfn
