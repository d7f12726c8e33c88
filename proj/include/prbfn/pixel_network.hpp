#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace prbfn {

// Raised when (Z_II + Z_L) or a Z/S conversion is numerically singular.
class singular_network_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Multiport impedance description of a pixel cell: n_feed external feeding
// ports followed by q internal switch-loaded ports, one full Z matrix per
// frequency point.
struct PixelNetwork {
    int n_feed = 3;
    int q = 0;
    double z0 = 50.0;
    bool reciprocal = true;
    std::vector<double> freqs_hz;
    std::vector<Eigen::MatrixXcd> z;

    int n_ports() const { return n_feed + q; }

    Eigen::MatrixXcd z_ff(std::size_t f) const { return z[f].topLeftCorner(n_feed, n_feed); }
    Eigen::MatrixXcd z_fi(std::size_t f) const { return z[f].topRightCorner(n_feed, q); }
    Eigen::MatrixXcd z_if(std::size_t f) const { return z[f].bottomLeftCorner(q, n_feed); }
    Eigen::MatrixXcd z_ii(std::size_t f) const { return z[f].bottomRightCorner(q, q); }

    // Throws std::invalid_argument on structural violations (sizes, frequency
    // ordering, reciprocity when flagged).
    void validate() const;
};

// Two-element series circuits for the switch load in each state.
struct SwitchModel {
    double r_on_ohm = 1.5;
    double l_on_h = 0.7e-9;
    double r_off_ohm = 1.5;
    double c_off_f = 0.15e-12;

    std::complex<double> on_impedance(double f_hz) const;
    std::complex<double> off_impedance(double f_hz) const;
};

// Binary on/off vector over the q internal ports.
struct SwitchState {
    std::vector<std::uint8_t> bits;
};

// Bit string grouped in nibbles ("1010 1011 ..."), most significant switch
// first, matching the published state tables.
std::string to_bit_string(const SwitchState& x);
SwitchState from_bit_string(const std::string& s);

// Feed-port impedance with the internal ports eliminated through their
// loads: Z_PR = Z_FF - Z_FI (Z_II + Z_L(x))^-1 Z_IF. Throws
// singular_network_error naming frequency and state when the inner matrix
// has condition number > 1e12.
Eigen::MatrixXcd reduce_network(const PixelNetwork& net, const SwitchState& x,
                                const SwitchModel& sw, std::size_t f_index);

// S = (Z - Z0 I)(Z + Z0 I)^-1 and its inverse mapping, reference impedance Z0.
Eigen::MatrixXcd z_to_s(const Eigen::MatrixXcd& Z, double z0);
Eigen::MatrixXcd s_to_z(const Eigen::MatrixXcd& S, double z0);

// Output current ratios of the unit cell under matched feeds: the (2,1) and
// (3,1) scattering entries.
struct Transmissions {
    std::complex<double> s21;
    std::complex<double> s31;
};
Transmissions transmissions(const Eigen::MatrixXcd& S);

struct SurrogateParams {
    int q = 0;
    double coupling_scale = 1.0;  // 0 = feed and internal blocks decoupled
    double loss_scale = 0.05;     // series resistance, fraction of z0
    int n_feed = 3;
    double z0 = 50.0;
    double center_hz = 2.6e9;
    double band_fraction = 0.05;
    int n_freq = 21;
};

// Random reciprocal passive stand-in for an EM-solved pixel cell: per
// frequency a symmetric unitary scattering draw blended with series loss,
// converted to impedance. Deterministic given the seed; passivity of the
// final network is certified numerically.
PixelNetwork surrogate_cell(const SurrogateParams& params, std::uint64_t seed);

// Z = Z^T within tol at every frequency.
bool is_reciprocal(const PixelNetwork& net, double tol = 1e-9);

// Largest singular value of the scattering matrix over all frequencies.
double max_scattering_gain(const PixelNetwork& net);

// Averages the network with its image under an involutive port permutation
// (0-based, over all n_feed + q ports), making the result exactly invariant.
PixelNetwork symmetrize_network(const PixelNetwork& net, const std::vector<int>& port_perm);

}  // namespace prbfn
