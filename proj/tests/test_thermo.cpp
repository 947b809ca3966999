#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "opweight/error.hpp"
#include "opweight/linalg.hpp"
#include "opweight/oracle.hpp"
#include "opweight/thermo.hpp"
#include "test_support.hpp"

using namespace opweight;
using testing::pi;

namespace {

const QuenchParams kModel10{1.0, 1.0, 0.5, 10};

}  // namespace

TEST_CASE("product-state energy closed form") {
    CHECK(product_state_energy({0.0, 0.0}, kModel10, Boundary::open) == doctest::Approx(-14.0).epsilon(1e-15));
    CHECK(product_state_energy({0.0, 0.0}, kModel10, Boundary::periodic) == doctest::Approx(-15.0).epsilon(1e-15));
    CHECK(product_state_energy({0.0, 0.0}, kModel10) == product_state_energy({0.0, 0.0}, kModel10, Boundary::periodic));
    CHECK_THROWS_AS(product_state_energy({0.0, 0.0}, QuenchParams{1.0, 1.0, 0.5, 2}), Error);
    CHECK(std::abs(product_state_energy({pi / 2, pi / 2}, kModel10)) < 1e-14);
    CHECK(std::abs(product_state_energy({pi / 2, pi / 2}, QuenchParams{2.3, -0.7, 1.9, 7})) < 1e-14);
}

TEST_CASE("product-state energy equals the dense trace") {
    const QuenchParams p{1.0, 1.0, 0.5, 6};
    const auto h = oracle::hamiltonian(p);
    const DenseMatrix ring = dense_hamiltonian(p, 12, Boundary::periodic).cast<std::complex<double>>();
    for (const BlochAngles a : {BlochAngles{0.3, 1.1}, BlochAngles{2.0, 4.0}, BlochAngles{pi, 0.0}}) {
        const auto rho = oracle::to_matrix(oracle::product_state(a, p.L));
        CHECK(std::abs(product_state_energy(a, p, Boundary::open) - (h * rho).trace().real()) < 1e-12);
        CHECK(std::abs(product_state_energy(a, p, Boundary::periodic) - (ring * rho).trace().real()) < 1e-12);
    }
}

TEST_CASE("ring Hamiltonian adds exactly the closing bond") {
    const QuenchParams p{1.3, 0.7, 0.4, 5};
    const RealMatrix diff = dense_hamiltonian(p, 12, Boundary::periodic) - dense_hamiltonian(p, 12, Boundary::open);
    // −J σ^z_1 σ^z_5 is diagonal with entries ±J.
    CHECK((diff - RealMatrix(diff.diagonal().asDiagonal())).norm() == 0.0);
    for (Eigen::Index s = 0; s < diff.rows(); ++s) {
        const double z1 = (s >> 4) & 1 ? -1.0 : 1.0;
        const double z5 = s & 1 ? -1.0 : 1.0;
        CHECK(std::abs(diff(s, s) + p.J * z1 * z5) < 1e-14);
    }
}

TEST_CASE("thermal energy limits") {
    const QuenchParams p{1.0, 1.0, 0.5, 8};
    const ThermalSpectrum spectrum(p);
    CHECK(std::abs(spectrum.energy(0.0)) < 1e-12);
    CHECK(std::abs(spectrum.energy(50.0) - spectrum.ground_energy()) < 1e-6);
    CHECK(std::abs(spectrum.energy(-200.0) - spectrum.top_energy()) < 1e-6);
    CHECK(std::abs(thermal_energy(0.7, p) - spectrum.energy(0.7)) < 1e-14);
    CHECK_THROWS_AS(ThermalSpectrum(QuenchParams{1.0, 1.0, 0.5, 13}), Error);
}

TEST_CASE("thermal energy matches an extended-precision sum over the dense spectrum") {
    const QuenchParams p{1.0, 1.0, 0.5, 8};
    const DenseMatrix h = oracle::hamiltonian(p);
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
    long double z = 0.0L;
    long double e = 0.0L;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const long double ei = es.eigenvalues()(i);
        const long double w = std::exp(-0.5L * ei);
        z += w;
        e += ei * w;
    }
    const double reference = double(e / z);
    CHECK(std::abs(ThermalSpectrum(p, Boundary::open).energy(0.5) - reference) < 1e-11);
}

TEST_CASE("thermal energy is strictly decreasing with variance as slope") {
    const ThermalSpectrum spectrum(QuenchParams{1.0, 1.0, 0.5, 8});
    // Beyond |β| ≈ 10 the change per step drops below double resolution at the spectral edges.
    double previous = std::numeric_limits<double>::infinity();
    for (double beta = -20.0; beta <= 20.0; beta += 0.25) {
        const double e = spectrum.energy(beta);
        if (std::abs(beta) <= 8.0) {
            CHECK(e < previous);
        } else {
            CHECK(e <= previous);
        }
        previous = e;
        CHECK(spectrum.variance(beta) >= 0.0);
        if (std::abs(beta) <= 8.0) CHECK(spectrum.variance(beta) > 0.0);
    }
    for (double beta : {-1.3, 0.0, 0.4, 2.0}) {
        const double h = 1e-5;
        const double slope = (spectrum.energy(beta + h) - spectrum.energy(beta - h)) / (2 * h);
        CHECK(slope == doctest::Approx(-spectrum.variance(beta)).epsilon(1e-6));
    }
}

TEST_CASE("solve_beta residual and exact zero on the infinite-temperature locus") {
    const ThermalSpectrum spectrum(kModel10);
    const auto zero = solve_beta({pi / 2, pi / 2}, spectrum);
    CHECK(zero.beta == 0.0);
    CHECK(std::isinf(zero.temperature));
    for (const BlochAngles a : {BlochAngles{0.0, 0.0}, BlochAngles{0.7, 2.0}, BlochAngles{1.9, 0.0},
                                BlochAngles{pi / 2, pi}, BlochAngles{2.8, 5.5}}) {
        const auto tp = solve_beta(a, spectrum);
        CHECK(std::abs(spectrum.energy(tp.beta) - product_state_energy(a, kModel10, spectrum.boundary())) < 1e-9 * 10);
        CHECK(tp.beta * tp.temperature == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(tp.energy_density * 10 >= spectrum.ground_energy());
        CHECK(tp.energy_density * 10 <= spectrum.top_energy());
    }
}

TEST_CASE("solve_beta rejects energies outside the spectrum") {
    const ThermalSpectrum spectrum(QuenchParams{1.0, 0.0, 0.0, 4}, Boundary::open);
    // g = h = 0: the all-up state is a ground state, so no finite β reaches it.
    CHECK_THROWS_AS(solve_beta({0.0, 0.0}, spectrum), Error);
}

TEST_CASE("quoted temperatures at L=10") {
    for (Boundary b : {Boundary::periodic, Boundary::open}) {
        const auto north = solve_beta({0.0, 0.0}, kModel10, b);
        CHECK(std::abs(north.temperature - 1.37) < 0.05);
        CHECK(std::abs(north.beta - 0.73) < 0.05);
    }
}

TEST_CASE("ring temperatures are stable in L while open chains drift") {
    // β at the polar angle of the map maximum, θ = 23°, φ = 0.
    const BlochAngles a = BlochAngles::from_degrees(23.0, 0.0);
    const double ring8 = solve_beta(a, QuenchParams{1.0, 1.0, 0.5, 8}).beta;
    const double ring10 = solve_beta(a, kModel10).beta;
    const double open10 = solve_beta(a, kModel10, Boundary::open).beta;
    CHECK(std::abs(ring8 - ring10) < 1e-3);
    CHECK(std::abs(ring10 - 1.63) < 0.01);
    CHECK(ring10 - open10 > 0.05);
}

TEST_CASE("map symmetries and coarse sign structure") {
    const ThermalSpectrum spectrum(kModel10);
    const auto map = bloch_map(10.0, 10.0, spectrum, 2);
    REQUIRE(map.size() == 19 * 36);
    for (std::size_t j = 1; j < 36; ++j) CHECK(map[j].beta == map[0].beta);
    for (std::size_t i = 0; i < 19; ++i) {
        for (std::size_t j = 1; j < 36; ++j) {
            CHECK(std::abs(map[i * 36 + j].beta - map[i * 36 + (36 - j)].beta) < 1e-8);
        }
    }
    // Positive patch around the north pole, negative patch around |X−⟩ (θ = 90°, φ = 180°).
    for (std::size_t i = 0; i <= 2; ++i)
        for (std::size_t j = 0; j < 36; ++j) CHECK(map[i * 36 + j].beta > 0.0);
    for (std::size_t i = 8; i <= 10; ++i)
        for (std::size_t j = 16; j <= 20; ++j) CHECK(map[i * 36 + j].beta < 0.0);
    const auto single = bloch_map(10.0, 10.0, spectrum, 1);
    for (std::size_t k = 0; k < map.size(); ++k) CHECK(single[k].beta == map[k].beta);
    CHECK_THROWS_AS(bloch_map(7.0, 10.0, spectrum), Error);
    CHECK_THROWS_AS(bloch_map(10.0, 0.0, spectrum), Error);
}
