#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "prbfn/current_optimizer.hpp"

namespace prbfn {

// Pattern correlation of the multiport antenna; identity under perfect port
// isolation.
struct AntennaCorrelation {
    Eigen::MatrixXcd k;

    static AntennaCorrelation identity(int n) {
        return {Eigen::MatrixXcd::Identity(n, n)};
    }
    // Hermitian within 1e-12, eigenvalues >= -1e-10 (relative to the largest).
    void validate() const;
};

// Correlated complex channel realizations: one T x N block per
// (user, location), all drawn from the same state covariance.
struct ChannelEnsemble {
    int n_states = 0;
    int users = 0;
    int locations = 0;
    int t = 0;
    std::uint64_t seed = 0;
    std::vector<Eigen::MatrixXcd> blocks;  // index user * locations + location

    const Eigen::MatrixXcd& block(int user, int location) const;
};

// C = |B^H K B| with the diagonal normalized to exactly 1. Throws on a zero
// diagonal entry of the underlying Gram.
CorrelationMatrix pattern_correlation(const BeamMatrix& B, const AntennaCorrelation& K);

// Monte-Carlo estimate of E[exp(-j*2*pi*(d/lambda)*cos(phi))] over a uniform
// ring, the sampling route to the J0 spatial correlation.
std::complex<double> spatial_corr_mc(double d_over_lambda, long long samples, std::uint64_t seed);

// Draws T i.i.d. CN(0, Sigma) vectors per (user, location) block with
// Sigma = B^H K B via eigenfactorization. Blocks are independent; draws are
// chunked with derived seeds, so partitioning T across workers reproduces
// the serial stream. Throws when Sigma fails PSD beyond a -1e-10 relative
// eigenvalue tolerance.
ChannelEnsemble generate_channels(const BeamMatrix& B, const AntennaCorrelation& K, int T,
                                  int users, std::uint64_t seed, int locations = 1);

struct FamaPick {
    int port = 0;  // 0-based
    double sir_db = 0.0;
    bool infinite = false;  // interferer power exactly zero at the winning port
};

// Per-realization max-SIR port selection between a desired-user slice and an
// interferer slice (same T x N shape). Ties go to the lowest port index.
std::vector<FamaPick> fama_select(const Eigen::MatrixXcd& user1, const Eigen::MatrixXcd& user2);

// Averaged lag autocorrelation across states: for each (user, location)
// block, R(i) = sum over j,t of h_t(j) conj(h_t(i+j)) and
// sigma2(i) = sum over j of ||h(:,j)|| * ||h(:,i+j)||; entries |R|/sigma2
// averaged over blocks. Lag 0 is exactly 1. The centered variant subtracts
// per-state sample means first (off by default; the estimator is defined
// without centering).
std::vector<double> measured_correlation(const ChannelEnsemble& ens, bool centered = false);

}  // namespace prbfn
