#include "doctest.h"

#include <cmath>
#include <random>

#include "opweight/error.hpp"
#include "opweight/evolution.hpp"
#include "opweight/mps.hpp"
#include "opweight/oracle.hpp"
#include "opweight/projectors.hpp"
#include "test_support.hpp"

using namespace opweight;
using testing::pi;

TEST_CASE("local operator is a unit-norm weight-one string") {
    const auto x = local_operator_mps(PauliLabel::x, 2, 4);
    CHECK(inner(x, x) == 1.0);
    CHECK(x.max_bond() == 1);
    const auto dense = oracle::from_mps(x);
    int nonzero = 0;
    for (Eigen::Index i = 0; i < dense.coefficients.size(); ++i) {
        if (dense.coefficients(i) == 0.0) continue;
        ++nonzero;
        PauliString s{{}, Frame::pauli};
        for (int j = 3; j >= 0; --j) s.labels.insert(s.labels.begin(), std::uint8_t((i >> (2 * (3 - j))) & 3));
        CHECK(weight_split(s, parallel_basis({pi / 2, 0})).total == 1);
    }
    CHECK(nonzero == 1);
    CHECK(expectation(product_state_mps({pi / 2, 0.0}, 4), x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(local_operator_mps(PauliLabel::x, 0, 4), Error);
    CHECK_THROWS_AS(local_operator_mps(PauliLabel::x, 5, 4), Error);
}

TEST_CASE("inner products") {
    const auto x = local_operator_mps(PauliLabel::x, 1, 3);
    const auto z = local_operator_mps(PauliLabel::z, 1, 3);
    CHECK(inner(x, z) == 0.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        const auto a = testing::random_mps(4, 3, rng);
        const auto b = testing::random_mps(4, 2, rng);
        const double dense = oracle::from_mps(a).coefficients.dot(oracle::from_mps(b).coefficients);
        CHECK(std::abs(inner(a, b) - dense) < 1e-12 * std::max(1.0, std::abs(dense)));
        CHECK(std::abs(inner(a, b) - inner(b, a)) < 1e-13 * std::max(1.0, std::abs(dense)));
    }
    CHECK_THROWS_AS(inner(x, local_operator_mps(PauliLabel::x, 1, 4)), Error);
    auto px = to_parallel_frame(x, parallel_basis({0.2, 0.3}));
    CHECK_THROWS_AS(inner(px, x), Error);
}

TEST_CASE("identity MPO leaves a state unchanged") {
    std::mt19937_64 rng(2);
    const auto a = testing::random_mps(5, 3, rng);
    const auto b = apply_mpo(identity_mpo(5), a, Truncation{});
    const double fidelity = inner(a, b) / std::sqrt(inner(a, a) * inner(b, b));
    CHECK(fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner(b, b) - inner(a, a)) < 1e-12 * inner(a, a));
}

TEST_CASE("weight projector on a local operator") {
    const auto x = local_operator_mps(PauliLabel::x, 2, 4);
    const auto p1 = apply_mpo(weight_projector(1, 4).mpo, x, Truncation{});
    CHECK(inner(p1, x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inner(p1, p1) == doctest::Approx(1.0).epsilon(1e-14));
    const auto p2 = apply_mpo(weight_projector(2, 4).mpo, x, Truncation{});
    CHECK(inner(p2, p2) == 0.0);
}

TEST_CASE("random MPO times MPS matches the dense product") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 5; ++i) {
        const auto mpo = testing::random_mpo(4, 2, rng);
        const auto a = testing::random_mps(4, 3, rng);
        const auto b = apply_mpo(mpo, a, Truncation{});
        const Eigen::VectorXd want = oracle::apply_mpo(mpo, oracle::from_mps(a).coefficients);
        const Eigen::VectorXd got = oracle::from_mps(b).coefficients;
        CHECK(testing::max_abs(got - want) < 1e-10 * testing::max_abs(want));
        CHECK(b.ledger.epsilon < 1e-20 * want.squaredNorm());
    }
}

TEST_CASE("truncation never increases the norm and is recorded") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 5; ++i) {
        auto a = testing::random_mps(6, 8, rng);
        const double n0 = inner(a, a);
        for (double& x : a.sites[0].data) x /= std::sqrt(n0);
        const double before = inner(a, a);
        const auto b = apply_mpo(identity_mpo(6), a, Truncation{3, 0.0, 4096});
        CHECK(b.max_bond() <= 3);
        CHECK(inner(b, b) <= before + 1e-12);
        CHECK(std::abs(inner(b, b) + b.ledger.epsilon - before) < 1e-10);
        CHECK(!b.ledger.per_step.empty());
    }
}

TEST_CASE("hard cap raises a resource error") {
    std::mt19937_64 rng(8);
    const auto a = testing::random_mps(6, 8, rng);
    CHECK_THROWS_AS(apply_mpo(identity_mpo(6), a, Truncation{0, 0.0, 4}), Error);
    try {
        apply_mpo(identity_mpo(6), a, Truncation{0, 0.0, 4});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resource_limit);
    }
}

TEST_CASE("osee of simple states") {
    const auto x = local_operator_mps(PauliLabel::x, 2, 4);
    for (std::size_t cut = 1; cut < 4; ++cut) CHECK(osee(x, cut) == 0.0);
    // (x⊗x + z⊗z)/√2 has two equal Schmidt values.
    OperatorMps bell;
    bell.sites.emplace_back(1, 2);
    bell.sites.emplace_back(2, 1);
    bell.sites[0](0, 1, 0) = 1.0 / std::sqrt(2.0);
    bell.sites[0](0, 3, 1) = 1.0 / std::sqrt(2.0);
    bell.sites[1](0, 1, 0) = 1.0;
    bell.sites[1](1, 3, 0) = 1.0;
    CHECK(osee(bell, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(osee(bell, 0), Error);
    CHECK_THROWS_AS(osee(bell, 2), Error);
}

TEST_CASE("osee of an evolved operator matches the dense Schmidt decomposition") {
    const QuenchParams p{1.0, 1.0, 0.5, 6};
    auto s = local_operator_mps(PauliLabel::x, 3, 6);
    advance(s, build_trotter_layer(p, 0.05), 20, Truncation{});
    const auto dense = oracle::from_mps(s);
    for (std::size_t cut = 1; cut < 6; ++cut) {
        CHECK(osee(s, cut) == doctest::Approx(oracle::osee(dense, cut)).epsilon(1e-10));
        const Eigen::VectorXd a = schmidt_values(s, cut);
        const Eigen::VectorXd b = oracle::schmidt_values(dense, cut);
        for (Eigen::Index k = 0; k < a.size(); ++k) CHECK(std::abs(a(k) - b(k)) < 1e-10);
    }
    const auto profile = osee_profile(s);
    CHECK(profile.size() == 5);
    CHECK(profile[2] == doctest::Approx(osee(s, 3)));
}

TEST_CASE("canonical centre moves without changing the vector") {
    std::mt19937_64 rng(10);
    auto a = testing::random_mps(5, 3, rng);
    const auto dense = oracle::from_mps(a).coefficients;
    for (std::size_t site : {4u, 0u, 2u}) {
        move_center(a, site);
        CHECK(a.center == site);
        CHECK(testing::max_abs(oracle::from_mps(a).coefficients - dense) < 1e-12 * testing::max_abs(dense));
    }
    compress(a, Truncation{});
    CHECK(testing::max_abs(oracle::from_mps(a).coefficients - dense) < 1e-12 * testing::max_abs(dense));
}

TEST_CASE("frame rotations round trip") {
    std::mt19937_64 rng(12);
    const auto a = testing::random_mps(4, 2, rng);
    const auto basis = parallel_basis({1.1, 4.2});
    const auto r = to_parallel_frame(a, basis);
    CHECK(r.frame == Frame::parallel);
    CHECK(inner(r, r) == doctest::Approx(inner(a, a)).epsilon(1e-13));
    const auto back = to_pauli_frame(r, basis);
    CHECK(testing::max_abs(oracle::from_mps(back).coefficients - oracle::from_mps(a).coefficients) < 1e-12);
    CHECK_THROWS_AS(to_pauli_frame(a, basis), Error);
}

TEST_CASE("MPO product and compression") {
    std::mt19937_64 rng(14);
    const auto a = testing::random_mpo(4, 2, rng);
    const auto b = testing::random_mpo(4, 3, rng);
    const auto v = testing::random_vector(256, rng);
    const Eigen::VectorXd want = oracle::apply_mpo(a, oracle::apply_mpo(b, v));
    const Mpo ab = mpo_product(a, b);
    CHECK(testing::max_abs(oracle::apply_mpo(ab, v) - want) < 1e-10 * testing::max_abs(want));
    const Mpo c = compress_mpo(ab, 0.0);
    CHECK(c.max_bond() <= 6);
    CHECK(testing::max_abs(oracle::apply_mpo(c, v) - want) < 1e-10 * testing::max_abs(want));
}

TEST_CASE("validate rejects broken chains") {
    auto a = local_operator_mps(PauliLabel::z, 1, 3);
    a.sites[1] = SiteTensor(2, 1);
    CHECK_THROWS_AS(a.validate(), Error);
}
