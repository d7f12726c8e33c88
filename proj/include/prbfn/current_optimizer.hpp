#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "prbfn/fas_spec.hpp"

namespace prbfn {

// Beamforming current matrix: column n is the output current vector of
// reconfigurable state n. Feasible matrices have unit-norm columns.
using BeamMatrix = Eigen::MatrixXcd;

struct PgdOptions {
    double eta = 0.05;        // gradient step size
    double eps_stop = 1e-3;   // absolute stopping threshold on the objective f
    int max_iter = 20000;
    int restarts = 30;
    std::uint64_t seed = 1;
};

struct RestartResult {
    double objective = 0.0;
    int iterations = 0;
};

struct SolveReport {
    BeamMatrix best;
    double objective = 0.0;       // f = || |B^H B| - C_obj ||_F^2
    double epsilon = 0.0;         // objective normalized by the N_A=1 baseline
    int iterations = 0;
    bool converged = false;
    double phase_spread = 0.0;    // radians, see phase_spread()
    std::vector<RestartResult> per_restart;
};

// f(B) = || |B^H B| - C_obj ||_F^2, over all entries including the diagonal.
double objective(const BeamMatrix& B, const CorrelationMatrix& C_obj);

// Wirtinger gradient d f / d conj(B) = 2 B [ (|G| - C_obj) o sgn(G) ] with
// G = B^H B and sgn applied element-wise; sgn is taken as 0 where |G| < 1e-12
// (subgradient at the nonsmooth point). With this convention the real-valued
// derivatives satisfy df/dRe = 2 Re(grad), df/dIm = 2 Im(grad); the factor is
// kWirtingerPairFactor and the finite-difference tests pin it.
inline constexpr double kWirtingerPairFactor = 2.0;
inline constexpr double kSgnGuard = 1e-12;
Eigen::MatrixXcd gradient(const BeamMatrix& B, const CorrelationMatrix& C_obj);

// Scales every nonzero column to unit norm; an exactly-zero column is
// replaced by a random unit vector drawn from rng.
BeamMatrix project_columns(const Eigen::MatrixXcd& B, std::mt19937_64& rng);

// Mean over states of the spread (max - min) of entry phases relative to the
// first row, each wrapped to (-pi, pi]. The restart selection minimizes this.
double phase_spread(const BeamMatrix& B);

// || C - C_obj ||_F^2 / || 1 - C_obj ||_F^2, the deviation normalized by the
// single-output-port baseline (whose Gram magnitude is the all-one matrix).
// Throws if C_obj is all-one.
double relative_error(const Eigen::MatrixXd& C, const CorrelationMatrix& C_obj);

// Converts a relative-error threshold into the absolute objective threshold
// used as PGD stopping tolerance: eps0 * || 1 - C_obj ||_F^2.
double absolute_f_threshold(const CorrelationMatrix& C_obj, double eps0);

// Projected gradient descent from a seeded random start (or B0 when given).
// Stops when f < opts.eps_stop or after opts.max_iter iterations;
// non-convergence is reported, not thrown. Deterministic given the seed.
SolveReport pgd_solve(const CorrelationMatrix& C_obj, int n_a, const PgdOptions& opts,
                      const std::optional<BeamMatrix>& B0 = std::nullopt);

// Runs opts.restarts independent solves with per-restart derived seeds.
// Among restarts meeting the threshold, returns the one with the smallest
// phase spread; otherwise the one with the lowest objective.
SolveReport multi_restart(const CorrelationMatrix& C_obj, int n_a, const PgdOptions& opts);

// Relative error achieved by multi_restart for each candidate output port
// count in na_range.
std::vector<std::pair<int, double>> na_sweep(double W, int N, const std::vector<int>& na_range,
                                             const PgdOptions& opts);

}  // namespace prbfn
