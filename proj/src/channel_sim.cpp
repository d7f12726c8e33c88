#include "prbfn/channel_sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prbfn/rng.hpp"

namespace prbfn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kDrawChunk = 1024;  // realizations per derived-seed chunk

}  // namespace

void AntennaCorrelation::validate() const {
    if (k.rows() != k.cols() || k.rows() == 0) {
        throw std::invalid_argument("AntennaCorrelation: matrix must be square");
    }
    if ((k - k.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("AntennaCorrelation: matrix must be Hermitian within 1e-12");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(k);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw std::invalid_argument("AntennaCorrelation: matrix must be positive semidefinite");
    }
}

const Eigen::MatrixXcd& ChannelEnsemble::block(int user, int location) const {
    if (user < 0 || user >= users || location < 0 || location >= locations) {
        throw std::invalid_argument("ChannelEnsemble: block index out of range");
    }
    return blocks[static_cast<std::size_t>(user) * static_cast<std::size_t>(locations) +
                  static_cast<std::size_t>(location)];
}

CorrelationMatrix pattern_correlation(const BeamMatrix& B, const AntennaCorrelation& K) {
    if (K.k.rows() != B.rows()) {
        throw std::invalid_argument("pattern_correlation: K dimension does not match output ports");
    }
    const Eigen::MatrixXcd sigma = B.adjoint() * K.k * B;
    const Eigen::Index n = sigma.rows();
    CorrelationMatrix C(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(sigma(i, i).real() > 0.0)) {
            throw std::invalid_argument("pattern_correlation: zero diagonal entry at state " +
                                        std::to_string(i + 1));
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            C(i, j) = std::abs(sigma(i, j)) /
                      std::sqrt(sigma(i, i).real() * sigma(j, j).real());
        }
    }
    return C;
}

std::complex<double> spatial_corr_mc(double d_over_lambda, long long samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("spatial_corr_mc: samples must be >= 1");
    std::mt19937_64 rng(seed);
    double re = 0.0, im = 0.0;
    for (long long s = 0; s < samples; ++s) {
        const double phi = uniform_range(rng, 0.0, 2.0 * kPi);
        const double arg = -2.0 * kPi * d_over_lambda * std::cos(phi);
        re += std::cos(arg);
        im += std::sin(arg);
    }
    return {re / static_cast<double>(samples), im / static_cast<double>(samples)};
}

ChannelEnsemble generate_channels(const BeamMatrix& B, const AntennaCorrelation& K, int T,
                                  int users, std::uint64_t seed, int locations) {
    if (T < 1 || users < 1 || locations < 1) {
        throw std::invalid_argument("generate_channels: T, users and locations must be >= 1");
    }
    K.validate();
    const Eigen::MatrixXcd sigma = B.adjoint() * K.k * B;
    const Eigen::Index n = sigma.rows();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sigma);
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw std::invalid_argument("generate_channels: covariance is not PSD within tolerance");
    }
    Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXcd factor =
        eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();  // factor * factor^H = sigma

    ChannelEnsemble ens;
    ens.n_states = static_cast<int>(n);
    ens.users = users;
    ens.locations = locations;
    ens.t = T;
    ens.seed = seed;
    ens.blocks.reserve(static_cast<std::size_t>(users) * static_cast<std::size_t>(locations));

    for (int u = 0; u < users; ++u) {
        for (int k = 0; k < locations; ++k) {
            const std::uint64_t block_seed =
                derive_seed(seed, static_cast<std::uint64_t>(u) * 0x10001ULL +
                                      static_cast<std::uint64_t>(k));
            Eigen::MatrixXcd block(T, n);
            Eigen::VectorXcd z(n);
            for (int t0 = 0; t0 < T; t0 += kDrawChunk) {
                std::mt19937_64 rng(
                    derive_seed(block_seed, static_cast<std::uint64_t>(t0 / kDrawChunk)));
                const int hi = std::min(T, t0 + kDrawChunk);
                for (int t = t0; t < hi; ++t) {
                    for (Eigen::Index i = 0; i < n; ++i) z(i) = standard_complex_gaussian(rng);
                    block.row(t) = (factor * z).transpose();
                }
            }
            ens.blocks.push_back(std::move(block));
        }
    }
    return ens;
}

std::vector<FamaPick> fama_select(const Eigen::MatrixXcd& user1, const Eigen::MatrixXcd& user2) {
    if (user1.rows() != user2.rows() || user1.cols() != user2.cols()) {
        throw std::invalid_argument("fama_select: slices must have equal shape");
    }
    const Eigen::Index T = user1.rows();
    const Eigen::Index n = user1.cols();
    if (n < 1) throw std::invalid_argument("fama_select: no ports");

    std::vector<FamaPick> picks;
    picks.reserve(static_cast<std::size_t>(T));
    for (Eigen::Index t = 0; t < T; ++t) {
        int best_port = 0;
        double best_ratio = -1.0;
        bool best_inf = false;
        for (Eigen::Index p = 0; p < n; ++p) {
            const double sig = std::norm(user1(t, p));
            const double intf = std::norm(user2(t, p));
            if (intf == 0.0) {
                if (sig > 0.0 && !best_inf) {
                    best_port = static_cast<int>(p);
                    best_inf = true;
                }
                continue;  // 0/0 never wins
            }
            if (best_inf) continue;
            const double ratio = sig / intf;
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best_port = static_cast<int>(p);
            }
        }
        FamaPick pick;
        pick.port = best_port;
        pick.infinite = best_inf;
        pick.sir_db = best_inf ? std::numeric_limits<double>::infinity()
                               : 10.0 * std::log10(std::max(best_ratio, 0.0));
        picks.push_back(pick);
    }
    return picks;
}

std::vector<double> measured_correlation(const ChannelEnsemble& ens, bool centered) {
    if (ens.blocks.empty()) throw std::invalid_argument("measured_correlation: empty ensemble");
    const int n = ens.n_states;

    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    for (const Eigen::MatrixXcd& raw : ens.blocks) {
        Eigen::MatrixXcd h = raw;
        if (centered) {
            const Eigen::RowVectorXcd mean = h.colwise().mean();
            h.rowwise() -= mean;
        }
        Eigen::VectorXd col_norm(n);
        for (int j = 0; j < n; ++j) {
            col_norm(j) = h.col(j).norm();
            if (col_norm(j) == 0.0) {
                throw std::invalid_argument("measured_correlation: state " + std::to_string(j + 1) +
                                            " has zero power");
            }
        }
        // At lag 0 both R and sigma2 reduce to the same sum of squared norms,
        // so the ratio is 1 by definition.
        c[0] += 1.0;
        for (int lag = 1; lag < n; ++lag) {
            std::complex<double> r(0.0, 0.0);
            double sigma2 = 0.0;
            for (int j = 0; j + lag < n; ++j) {
                r += h.col(j).dot(h.col(j + lag));  // conjugates the first factor
                sigma2 += col_norm(j) * col_norm(j + lag);
            }
            c[static_cast<std::size_t>(lag)] += std::abs(r) / sigma2;
        }
    }
    for (double& v : c) v /= static_cast<double>(ens.blocks.size());
    return c;
}

}  // namespace prbfn
