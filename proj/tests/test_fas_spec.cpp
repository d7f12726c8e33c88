#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "prbfn/fas_spec.hpp"

using namespace prbfn;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("bessel_j0 reference values") {
    CHECK(bessel_j0(0.0) == 1.0);

    // First root, located by bisection on the independent series.
    const double root = oracle::j0_first_root();
    CHECK(root == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(std::abs(bessel_j0(root)) < 1e-10);

    CHECK(bessel_j0(kPi / 10.0) == doctest::Approx(oracle::j0_series(kPi / 10.0)).epsilon(1e-9));
    CHECK(bessel_j0(-3.7) == doctest::Approx(oracle::j0_series(3.7)).epsilon(1e-12));

    CHECK_THROWS_AS(bessel_j0(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j0(INFINITY), std::invalid_argument);
}

TEST_CASE("bessel_j0 tracks the series oracle on a dense grid") {
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double x = 40.0 * k / 1000.0;
        worst = std::max(worst, std::abs(bessel_j0(x) - oracle::j0_series(x)));
    }
    CHECK(worst < 1e-12);  // requirement is 1e-9; the quadrature does much better
}

TEST_CASE("bessel_j0 meets 1e-12 up to |x| = 100") {
    // Two independent oracles cross-check each other where both are valid.
    for (double x : {1.0, 5.0, 17.3, 30.0, 45.0}) {
        CHECK(std::abs(oracle::j0_miller(x) - oracle::j0_series(x)) < 1e-13);
    }
    double worst = 0.0;
    for (int k = 0; k <= 500; ++k) {
        const double x = 100.0 * k / 500.0;
        const double ref = (x <= 45.0) ? oracle::j0_series(x) : oracle::j0_miller(x);
        worst = std::max(worst, std::abs(bessel_j0(x) - ref));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("fas params validation and warnings") {
    CHECK_THROWS_AS(make_fas_params(0.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(make_fas_params(-1.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(make_fas_params(0.5, 1), std::invalid_argument);

    const FasParams ok = make_fas_params(0.5, 11);
    CHECK(ok.density() == doctest::Approx(22.0));
    CHECK(ok.warnings.empty());

    const FasParams sparse = make_fas_params(1.0, 5);  // density 5 < 10
    CHECK(sparse.warnings.size() == 1);

    const FasParams wide = make_fas_params(6.0, 80);  // W beyond validated range
    CHECK(wide.warnings.size() == 1);
}

TEST_CASE("target correlation entries") {
    const FasParams p = make_fas_params(0.5, 11);
    const CorrelationMatrix C = make_target_correlation(p);
    CHECK(C(0, 0) == 1.0);
    CHECK(C(0, 1) == doctest::Approx(std::abs(oracle::j0_series(kPi / 10.0))).epsilon(1e-6));
    CHECK(C(0, 1) == doctest::Approx(0.97554).epsilon(1e-4));
    CHECK(is_valid_correlation_matrix(C));
}

TEST_CASE("target correlation matches the oracle entry-wise") {
    for (auto [W, N] : {std::pair{0.5, 11}, std::pair{1.5, 18}}) {
        const CorrelationMatrix C = make_target_correlation(make_fas_params(W, N));
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                const double expect = std::abs(oracle::j0_series(2.0 * kPi * std::abs(i - j) * W / (N - 1)));
                CHECK(std::abs(C(i, j) - expect) < 1e-9);
            }
        }
    }
}

TEST_CASE("W=1.5 lobe structure: monotone head, sub-0.5 tail") {
    const CorrelationMatrix C = make_target_correlation(make_fas_params(1.5, 18));
    // First lobe decreases until J0 crosses zero near separation 5.
    for (int d = 0; d < 4; ++d) CHECK(C(0, d) > C(0, d + 1));
    for (int d = 5; d < 18; ++d) CHECK(C(0, d) < 0.5);
}

TEST_CASE("target correlation invariants over a parameter sweep") {
    for (double W : {0.25, 0.5, 1.0, 1.5, 3.0, 5.0}) {
        for (int N : {2, 3, 11, 18, 64}) {
            const CorrelationMatrix C = make_target_correlation(make_fas_params(W, N));
            REQUIRE(C.rows() == N);
            for (int i = 0; i < N; ++i) {
                CHECK(C(i, i) == 1.0);
                for (int j = 0; j < N; ++j) {
                    CHECK(C(i, j) == C(j, i));  // exact: built from the lag table
                    CHECK(C(i, j) >= 0.0);
                    CHECK(C(i, j) <= 1.0);
                    if (i + 1 < N && j + 1 < N) CHECK(C(i, j) == C(i + 1, j + 1));  // Toeplitz
                }
            }
        }
    }
}

TEST_CASE("min_output_ports rule") {
    CHECK(min_output_ports(0.5) == 2);
    CHECK(min_output_ports(1.5) == 4);
    CHECK(min_output_ports(2.3) == 8);  // floor(4.6)+1 = 5 -> 8
    CHECK(min_output_ports(1.0) == 4);  // floor(2)+1 = 3 -> 4
    CHECK(min_output_ports(0.2) == 1);
    CHECK_THROWS_AS(min_output_ports(0.0), std::invalid_argument);
}
