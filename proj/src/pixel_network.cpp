#include "prbfn/pixel_network.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "prbfn/rng.hpp"

namespace prbfn {

namespace {

constexpr double kCondLimit = 1e12;

Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
    Eigen::MatrixXcd G(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            G(i, j) = standard_complex_gaussian(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
    Eigen::MatrixXcd Q = qr.householderQ();
    // Fix the phase ambiguity so the distribution is Haar.
    const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = R(j, j);
        Q.col(j) *= (d == std::complex<double>(0.0, 0.0)) ? 1.0 : d / std::abs(d);
    }
    return Q;
}

// Symmetric unitary scattering draw: U U^T is symmetric and unitary for any
// unitary U.
Eigen::MatrixXcd symmetric_unitary(int n, std::mt19937_64& rng) {
    const Eigen::MatrixXcd U = haar_unitary(n, rng);
    return U * U.transpose();
}

}  // namespace

void PixelNetwork::validate() const {
    if (n_feed < 1 || q < 0) {
        throw std::invalid_argument("PixelNetwork: n_feed must be >= 1 and q >= 0");
    }
    if (freqs_hz.empty() || freqs_hz.size() != z.size()) {
        throw std::invalid_argument("PixelNetwork: one impedance matrix per frequency required");
    }
    for (std::size_t f = 0; f < freqs_hz.size(); ++f) {
        if (!(freqs_hz[f] > 0.0)) {
            throw std::invalid_argument("PixelNetwork: frequencies must be positive");
        }
        if (f > 0 && !(freqs_hz[f] > freqs_hz[f - 1])) {
            throw std::invalid_argument("PixelNetwork: frequencies must be strictly increasing");
        }
        if (z[f].rows() != n_ports() || z[f].cols() != n_ports()) {
            throw std::invalid_argument("PixelNetwork: impedance matrix size mismatch at point " +
                                        std::to_string(f));
        }
    }
    if (reciprocal && !is_reciprocal(*this)) {
        throw std::invalid_argument("PixelNetwork: flagged reciprocal but Z != Z^T within 1e-9");
    }
}

std::complex<double> SwitchModel::on_impedance(double f_hz) const {
    const double w = 2.0 * 3.14159265358979323846 * f_hz;
    return {r_on_ohm, w * l_on_h};
}

std::complex<double> SwitchModel::off_impedance(double f_hz) const {
    const double w = 2.0 * 3.14159265358979323846 * f_hz;
    return {r_off_ohm, -1.0 / (w * c_off_f)};
}

std::string to_bit_string(const SwitchState& x) {
    std::string s;
    s.reserve(x.bits.size() + x.bits.size() / 4);
    for (std::size_t i = 0; i < x.bits.size(); ++i) {
        if (i > 0 && i % 4 == 0) s.push_back(' ');
        s.push_back(x.bits[i] ? '1' : '0');
    }
    return s;
}

SwitchState from_bit_string(const std::string& s) {
    SwitchState x;
    for (char c : s) {
        if (c == '0' || c == '1') {
            x.bits.push_back(static_cast<std::uint8_t>(c - '0'));
        } else if (c != ' ') {
            throw std::invalid_argument("from_bit_string: invalid character '" + std::string(1, c) +
                                        "'");
        }
    }
    return x;
}

Eigen::MatrixXcd reduce_network(const PixelNetwork& net, const SwitchState& x,
                                const SwitchModel& sw, std::size_t f_index) {
    if (f_index >= net.freqs_hz.size()) {
        throw std::invalid_argument("reduce_network: frequency index out of range");
    }
    if (static_cast<int>(x.bits.size()) != net.q) {
        throw std::invalid_argument("reduce_network: switch state length " +
                                    std::to_string(x.bits.size()) + " does not match q = " +
                                    std::to_string(net.q));
    }
    if (sw.r_on_ohm < 0.0 || sw.r_off_ohm < 0.0) {
        throw std::invalid_argument("reduce_network: switch load resistances must be >= 0");
    }
    if (net.q == 0) {
        return net.z_ff(f_index);
    }
    const double f_hz = net.freqs_hz[f_index];
    Eigen::MatrixXcd inner = net.z_ii(f_index);
    for (int k = 0; k < net.q; ++k) {
        inner(k, k) += x.bits[static_cast<std::size_t>(k)] ? sw.on_impedance(f_hz)
                                                           : sw.off_impedance(f_hz);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(inner);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / kCondLimit)) {
        throw singular_network_error("reduce_network: Z_II + Z_L singular (cond > 1e12) at " +
                                     std::to_string(f_hz) + " Hz, state " + to_bit_string(x));
    }
    return net.z_ff(f_index) - net.z_fi(f_index) * lu.solve(net.z_if(f_index));
}

Eigen::MatrixXcd z_to_s(const Eigen::MatrixXcd& Z, double z0) {
    if (Z.rows() != Z.cols()) throw std::invalid_argument("z_to_s: matrix must be square");
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(Z.rows(), Z.cols());
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Z + z0 * I);
    if (!(lu.rcond() > 1.0 / kCondLimit)) {
        throw singular_network_error("z_to_s: Z + Z0*I is singular");
    }
    // (Z - Z0 I) and (Z + Z0 I)^-1 commute, so the one-sided solve is exact.
    return lu.solve(Z - z0 * I);
}

Eigen::MatrixXcd s_to_z(const Eigen::MatrixXcd& S, double z0) {
    if (S.rows() != S.cols()) throw std::invalid_argument("s_to_z: matrix must be square");
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(S.rows(), S.cols());
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(I - S);
    if (!(lu.rcond() > 1.0 / kCondLimit)) {
        throw singular_network_error("s_to_z: I - S is singular");
    }
    return z0 * lu.solve(I + S);
}

Transmissions transmissions(const Eigen::MatrixXcd& S) {
    if (S.rows() != 3 || S.cols() != 3) {
        throw std::invalid_argument("transmissions: expected a 3x3 scattering matrix");
    }
    return {S(1, 0), S(2, 0)};
}

PixelNetwork surrogate_cell(const SurrogateParams& params, std::uint64_t seed) {
    if (params.q < 0) throw std::invalid_argument("surrogate_cell: q must be >= 0");
    if (params.n_feed < 1) throw std::invalid_argument("surrogate_cell: n_feed must be >= 1");
    if (params.coupling_scale < 0.0 || params.coupling_scale > 1.0) {
        throw std::invalid_argument("surrogate_cell: coupling_scale must be in [0, 1]");
    }
    if (params.loss_scale < 0.0) {
        throw std::invalid_argument("surrogate_cell: loss_scale must be >= 0");
    }
    if (params.n_freq < 1) throw std::invalid_argument("surrogate_cell: n_freq must be >= 1");

    PixelNetwork net;
    net.n_feed = params.n_feed;
    net.q = params.q;
    net.z0 = params.z0;
    net.reciprocal = true;

    const int p = net.n_ports();
    net.freqs_hz.resize(static_cast<std::size_t>(params.n_freq));
    const double lo = params.center_hz * (1.0 - params.band_fraction / 2.0);
    const double hi = params.center_hz * (1.0 + params.band_fraction / 2.0);
    for (int k = 0; k < params.n_freq; ++k) {
        net.freqs_hz[static_cast<std::size_t>(k)] =
            (params.n_freq == 1) ? params.center_hz : lo + (hi - lo) * k / (params.n_freq - 1);
    }

    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(p, p);
    net.z.reserve(net.freqs_hz.size());
    for (std::size_t f = 0; f < net.freqs_hz.size(); ++f) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(f)));
        for (int attempt = 0;; ++attempt) {
            Eigen::MatrixXcd S = symmetric_unitary(p, rng);
            if (params.coupling_scale < 1.0) {
                Eigen::MatrixXcd blocked = Eigen::MatrixXcd::Zero(p, p);
                blocked.topLeftCorner(net.n_feed, net.n_feed) = symmetric_unitary(net.n_feed, rng);
                if (net.q > 0) {
                    blocked.bottomRightCorner(net.q, net.q) = symmetric_unitary(net.q, rng);
                }
                S = params.coupling_scale * S + (1.0 - params.coupling_scale) * blocked;
            }
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(I - S);
            if (!(lu.rcond() > 1.0 / kCondLimit)) {
                if (attempt >= 8) {
                    throw singular_network_error("surrogate_cell: could not draw invertible I - S");
                }
                continue;  // next draw from the same substream
            }
            Eigen::MatrixXcd Z = params.z0 * lu.solve(I + S);
            Z += params.loss_scale * params.z0 * I;
            // Make reciprocity exact.
            Z = ((Z + Z.transpose()) / 2.0).eval();
            net.z.push_back(std::move(Z));
            break;
        }
    }

    net.validate();
    const double gain = max_scattering_gain(net);
    if (!(gain <= 1.0 + 1e-12)) {
        throw std::runtime_error("surrogate_cell: passivity certification failed, |S| = " +
                                 std::to_string(gain));
    }
    return net;
}

bool is_reciprocal(const PixelNetwork& net, double tol) {
    for (const auto& Z : net.z) {
        if (((Z - Z.transpose()).cwiseAbs().maxCoeff()) > tol) return false;
    }
    return true;
}

double max_scattering_gain(const PixelNetwork& net) {
    double worst = 0.0;
    for (const auto& Z : net.z) {
        const Eigen::MatrixXcd S = z_to_s(Z, net.z0);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
        worst = std::max(worst, svd.singularValues()(0));
    }
    return worst;
}

PixelNetwork symmetrize_network(const PixelNetwork& net, const std::vector<int>& port_perm) {
    const int p = net.n_ports();
    if (static_cast<int>(port_perm.size()) != p) {
        throw std::invalid_argument("symmetrize_network: permutation length mismatch");
    }
    for (int i = 0; i < p; ++i) {
        if (port_perm[static_cast<std::size_t>(i)] < 0 ||
            port_perm[static_cast<std::size_t>(i)] >= p ||
            port_perm[static_cast<std::size_t>(port_perm[static_cast<std::size_t>(i)])] != i) {
            throw std::invalid_argument("symmetrize_network: permutation must be an involution");
        }
    }
    PixelNetwork out = net;
    for (auto& Z : out.z) {
        Eigen::MatrixXcd permuted(p, p);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                permuted(i, j) = Z(port_perm[static_cast<std::size_t>(i)],
                                   port_perm[static_cast<std::size_t>(j)]);
            }
        }
        Z = ((Z + permuted) / 2.0).eval();
    }
    return out;
}

}  // namespace prbfn
