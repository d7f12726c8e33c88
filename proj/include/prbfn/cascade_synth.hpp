#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "prbfn/current_optimizer.hpp"

namespace prbfn {

// Per-state target of one 1-input/2-output unit cell: output amplitudes
// (amp1^2 + amp2^2 = 1) and the phase difference between the two outputs.
// The discarded global phase follows the convention angle(i2) = 0.
struct UnitStateTarget {
    double amp1 = 0.0;
    double amp2 = 0.0;
    double dphase = 0.0;  // radians, in (-pi, pi]
};

struct UnitTarget {
    int stage = 0;  // 1-based, stage 1 feeds the single RF input
    int index = 0;  // 1-based position within the stage
    std::vector<UnitStateTarget> states;
};

// Routing entry of the mirror-split architecture: which second-stage unit
// design (1 or 2) drives each output pair in a given state, with the fixed
// SPDT hop count per RF path.
struct SpdtRoute {
    int state = 0;
    int upper_unit = 0;
    int upper_state = 0;
    int lower_unit = 0;
    int lower_state = 0;
    int spdt_hops = 2;
};

struct MirrorSplit {
    Eigen::MatrixXcd first_half;   // columns 1..N/2 of the source matrix
    Eigen::MatrixXcd second_half;  // columns N/2+1..N
    std::vector<SpdtRoute> routing;
    std::vector<double> mismatch;  // per-state residual of the mirror relation
    double max_mismatch = 0.0;
    bool mismatch_flagged = false;  // max_mismatch > 1e-6
    double spdt_loss_db = 0.7;      // per hop; equal hop counts keep phase differences intact
};

// Binary-tree cascade plan: stage m holds 2^(m-1) units; composing all stage
// transmissions reproduces the source matrix column-by-column up to the
// recorded per-column global phase.
struct CascadePlan {
    int M = 0;
    Eigen::Vector2cd splitter;  // equal power-divider output vector
    std::vector<UnitTarget> units;
    std::vector<double> global_phases;  // per state, radians
    std::optional<MirrorSplit> spdt_routing;
};

// Output 2-vector realized by a unit state, angle(i2) = 0 convention.
Eigen::Vector2cd unit_state_vector(const UnitStateTarget& t);

// Wraps an angle to (-pi, pi].
double wrap_phase(double a);

// Targets for one stage: unit k takes rows 2k-1, 2k of Bhat, normalized per
// state. Throws when a two-row sub-vector is exactly zero for some state.
std::vector<UnitTarget> stage_targets(const BeamMatrix& Bhat);

// H^H * i_n for one state, where H is the block-diagonal stage transmission
// assembled from the given unit-norm 2-vectors (norm checked within 1e-9).
// The stage Gram is the identity, so this recovers the previous-stage
// currents exactly and preserves the vector norm.
Eigen::VectorXcd backward_reduce(const Eigen::VectorXcd& i_n,
                                 const std::vector<Eigen::Vector2cd>& blocks);

// Full backward recursion from the final stage down to the RF input.
// Requires Bhat rows = 2^M with M >= 1; verifies the forward-composition
// residual before returning.
CascadePlan synthesize_plan(const BeamMatrix& Bhat);

// Rebuilds the beam matrix from the plan, column n = H_{M,n} ... H_{1,n}.
BeamMatrix forward_compose(const CascadePlan& plan);

// Largest over columns of the phase-invariant distance between matching
// columns of A and B: sqrt(|a|^2 + |b|^2 - 2|a^H b|).
double max_column_error_up_to_phase(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

// Splits a 4-row beam matrix into column halves for the SPDT-augmented
// architecture, records the mirror relation between the two second-stage
// units (flagged when the residual exceeds 1e-6) and assigns routing with
// two SPDT hops per RF path. Throws when N is odd or the matrix is not 4-row.
MirrorSplit mirror_split(const BeamMatrix& Bhat);

}  // namespace prbfn
