#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "opweight/analysis.hpp"
#include "opweight/error.hpp"
#include "opweight/experiments.hpp"
#include "opweight/oracle.hpp"
#include "test_support.hpp"

using namespace opweight;
using testing::pi;

namespace {

oracle::DenseOperatorVector random_dense(std::size_t L, std::mt19937_64& rng) {
    oracle::DenseOperatorVector v;
    v.L = L;
    v.coefficients = testing::random_vector(Eigen::Index(1) << (2 * L), rng);
    return v;
}

// Index of the string with `label` on 1-based `site` and identity elsewhere.
Eigen::Index single_site_index(std::size_t site, std::size_t L, int label) {
    return Eigen::Index(label) << (2 * (L - site));
}

}  // namespace

TEST_CASE("exact evolution at t=0 is the identity") {
    std::mt19937_64 rng(3);
    const auto v = random_dense(4, rng);
    const auto out = oracle::exact_heisenberg(v, QuenchParams{1.0, 1.0, 0.5, 4}, 0.0);
    CHECK(testing::max_abs(out.coefficients - v.coefficients) < 1e-13);
}

TEST_CASE("z is conserved without fields") {
    const QuenchParams p{1.0, 0.0, 0.0, 5};
    const auto z = oracle::local_operator(PauliLabel::z, 2, 5);
    for (double t : {0.3, 1.7, 4.0}) {
        CHECK(testing::max_abs(oracle::exact_heisenberg(z, p, t).coefficients - z.coefficients) < 1e-12);
    }
}

TEST_CASE("transverse field alone rotates z into -y") {
    const QuenchParams p{0.0, 1.0, 0.0, 4};
    const auto z = oracle::local_operator(PauliLabel::z, 1, 4);
    for (double t : {0.2, 0.9, 2.5}) {
        const auto out = oracle::exact_heisenberg(z, p, t);
        Eigen::VectorXd want = Eigen::VectorXd::Zero(out.coefficients.size());
        want(single_site_index(1, 4, 3)) = std::cos(2 * t);
        want(single_site_index(1, 4, 2)) = -std::sin(2 * t);
        CHECK(testing::max_abs(out.coefficients - want) < 1e-12);
    }
}

TEST_CASE("exact evolution conserves norm, trace and energy overlap") {
    std::mt19937_64 rng(5);
    const QuenchParams p{1.0, 1.0, 0.5, 5};
    const auto v = random_dense(5, rng);
    const auto h = oracle::from_matrix(oracle::hamiltonian(p), 5);
    const oracle::ExactPropagator prop(p);
    for (double t : {0.5, 1.0, 3.0}) {
        const auto out = prop.evolve(v, t);
        CHECK(std::abs(out.coefficients.norm() - v.coefficients.norm()) < 1e-10);
        CHECK(std::abs(out.coefficients(0) - v.coefficients(0)) < 1e-10);
        CHECK(std::abs(out.coefficients.dot(h.coefficients) - v.coefficients.dot(h.coefficients)) < 1e-10);
        CHECK(testing::max_abs(out.coefficients - oracle::exact_heisenberg(v, p, t).coefficients) < 1e-11);
    }
}

TEST_CASE("matrix round trip and single-site expectations") {
    std::mt19937_64 rng(7);
    const auto v = random_dense(3, rng);
    const auto back = oracle::from_matrix(oracle::to_matrix(v), 3);
    CHECK(testing::max_abs(back.coefficients - v.coefficients) < 1e-14);
    const BlochAngles a{0.8, 2.1};
    CHECK(oracle::expectation(oracle::local_operator(PauliLabel::x, 1, 3), a) ==
          doctest::Approx(std::sin(0.8) * std::cos(2.1)).epsilon(1e-14));
    CHECK(oracle::expectation(oracle::local_operator(PauliLabel::y, 1, 3), a) ==
          doctest::Approx(std::sin(0.8) * std::sin(2.1)).epsilon(1e-14));
    CHECK(oracle::expectation(oracle::local_operator(PauliLabel::z, 3, 3), a) ==
          doctest::Approx(std::cos(0.8)).epsilon(1e-14));
}

TEST_CASE("frame changes are inverse to each other") {
    std::mt19937_64 rng(9);
    const auto v = random_dense(4, rng);
    const auto basis = parallel_basis({1.1, 0.4});
    const auto par = oracle::to_parallel(v, basis);
    CHECK(par.frame == Frame::parallel);
    CHECK(std::abs(par.coefficients.norm() - v.coefficients.norm()) < 1e-12);
    CHECK(testing::max_abs(oracle::to_pauli(par, basis).coefficients - v.coefficients) < 1e-13);
}

TEST_CASE("weight sectors resolve the identity") {
    std::mt19937_64 rng(11);
    const auto v = random_dense(4, rng);
    const auto basis = parallel_basis({0.6, 1.3});
    const auto zero = oracle::exact_weight_sector(v, oracle::SectorKind::total, 0);
    CHECK(zero.coefficients(0) == v.coefficients(0));
    CHECK(zero.coefficients.tail(zero.coefficients.size() - 1).norm() == 0.0);
    for (auto kind : {oracle::SectorKind::total, oracle::SectorKind::parallel, oracle::SectorKind::orthogonal}) {
        const auto reference = kind == oracle::SectorKind::total ? v : oracle::to_parallel(v, basis);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(v.coefficients.size());
        for (std::size_t w = 0; w <= 4; ++w) sum += oracle::exact_weight_sector(v, kind, w, basis).coefficients;
        CHECK(testing::max_abs(sum - reference.coefficients) < 1e-13);
    }
    const auto c = oracle::contributing_part(v, basis);
    const auto n = oracle::noncontributing_part(v, basis);
    CHECK(testing::max_abs(c.coefficients + n.coefficients - oracle::to_parallel(v, basis).coefficients) < 1e-13);
    CHECK(std::abs(c.coefficients.dot(n.coefficients)) < 1e-13);
}

TEST_CASE("Trotter circuit converges to exact evolution at second order") {
    const QuenchParams p{1.0, 1.0, 0.5, 5};
    const auto x = oracle::local_operator(PauliLabel::x, 2, 5);
    const auto exact = oracle::exact_heisenberg(x, p, 1.0);
    const double coarse =
        (oracle::TrotterPropagator(p, 0.02).evolve(x, 50).coefficients - exact.coefficients).norm();
    const double fine = (oracle::TrotterPropagator(p, 0.01).evolve(x, 100).coefficients - exact.coefficients).norm();
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("dense Schmidt values are normalised") {
    std::mt19937_64 rng(13);
    const auto v = random_dense(4, rng);
    const Eigen::VectorXd s = oracle::schmidt_values(v, 2);
    CHECK(s.squaredNorm() == doctest::Approx(v.coefficients.squaredNorm()).epsilon(1e-12));
    CHECK(oracle::osee(oracle::local_operator(PauliLabel::x, 1, 4), 2) == doctest::Approx(0.0));
}

TEST_CASE("operator vectors beyond seven sites are refused") {
    CHECK_THROWS_AS(oracle::local_operator(PauliLabel::x, 1, 8), Error);
    CHECK_THROWS_AS(oracle::hamiltonian(QuenchParams{1.0, 1.0, 0.5, 13}), Error);
}

TEST_CASE("dense owe pipeline edge cases") {
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
    const auto start = oracle::exact_owe_pipeline({0.4, 0.2}, PauliLabel::x, 2, QuenchParams{1.0, 1.0, 0.5, 5},
                                                  {0.0}, 4);
    CHECK(start.owe[0] == 0.0);
    const auto frozen =
        oracle::exact_owe_pipeline({0.4, 0.2}, PauliLabel::z, 2, QuenchParams{1.0, 0.0, 0.0, 5}, times, 4);
    for (double w : frozen.owe) CHECK(w == 0.0);
}

TEST_CASE("TEBD owe pipeline matches the dense pipeline at L=6") {
    const QuenchParams p{1.0, 1.0, 0.5, 6};
    EvolutionConfig cfg;
    cfg.dt = 0.005;
    cfg.t_max = 2.0;
    const std::size_t stride = 20;
    for (const BlochAngles a : {BlochAngles{0.0, 0.0}, BlochAngles{pi / 4, pi}, BlochAngles{9 * pi / 10, 0.0}}) {
        const auto samples = sample_trajectory(PauliLabel::x, 3, a, p, cfg, 6, stride);
        const auto series = owe(contribution_series(samples), 4);
        const auto dense = oracle::exact_owe_pipeline(a, PauliLabel::x, 3, p, series.times, 4);
        REQUIRE(dense.owe.size() == series.owe.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < series.owe.size(); ++i) worst = std::max(worst, std::abs(series.owe[i] - dense.owe[i]));
        CAPTURE(worst);
        CHECK(worst < 1e-4);
    }
}
