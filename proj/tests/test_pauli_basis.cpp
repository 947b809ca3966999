#include "doctest.h"

#include <cmath>
#include <random>

#include "opweight/error.hpp"
#include "opweight/mps.hpp"
#include "opweight/pauli_basis.hpp"
#include "test_support.hpp"

using namespace opweight;
using testing::pi;

namespace {
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
}  // namespace

TEST_CASE("parallel vector at the north pole and at -x") {
    const auto n = parallel_basis({0.0, 0.0});
    CHECK(n.parallel[0] == 0.0);
    CHECK(n.parallel[1] == 0.0);
    CHECK(n.parallel[2] == 1.0);
    const auto m = parallel_basis({pi / 2, pi});
    CHECK(m.parallel[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(m.parallel[1]) < 1e-15);
    CHECK(std::abs(m.parallel[2]) < 1e-15);
}

TEST_CASE("basis is orthonormal and right handed everywhere") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.0, pi);
    std::uniform_real_distribution<double> ph(0.0, 2 * pi);
    std::vector<BlochAngles> angles{{0, 0}, {pi, 0}, {pi, 1.3}, {0, 4.0}};
    for (int i = 0; i < 200; ++i) angles.push_back({th(rng), ph(rng)});
    for (const auto& a : angles) {
        const auto b = parallel_basis(a);
        const Vec3* v[3] = {&b.parallel, &b.perp1, &b.perp2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(dot(*v[i], *v[j]) - (i == j ? 1.0 : 0.0)) < 1e-14);
        const Vec3 cross{b.perp1[1] * b.perp2[2] - b.perp1[2] * b.perp2[1],
                         b.perp1[2] * b.perp2[0] - b.perp1[0] * b.perp2[2],
                         b.perp1[0] * b.perp2[1] - b.perp1[1] * b.perp2[0]};
        CHECK(dot(cross, b.parallel) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(b.parallel[0] - std::sin(a.theta) * std::cos(a.phi)) < 1e-16);
        CHECK(std::abs(b.parallel[1] - std::sin(a.theta) * std::sin(a.phi)) < 1e-16);
        CHECK(b.parallel[2] == std::cos(a.theta));
        const Eigen::Matrix4d r = frame_rotation(b);
        CHECK((r * r.transpose() - Eigen::Matrix4d::Identity()).norm() < 1e-14);
    }
}

TEST_CASE("pole rotation sends z into the parallel slot") {
    const Eigen::Matrix4d r = frame_rotation(parallel_basis({0.0, 0.0}));
    Eigen::Vector4d z(0, 0, 0, 1);
    const Eigen::Vector4d out = r * z;
    CHECK(out(1) == 1.0);
    CHECK(out(0) == 0.0);
    CHECK(out(2) == 0.0);
    CHECK(out(3) == 0.0);
    CHECK(r(0, 0) == 1.0);
}

TEST_CASE("non-identity norm is frame independent") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 50; ++i) {
        const auto b = parallel_basis({std::abs(normal(rng)), std::abs(normal(rng))});
        Eigen::Vector4d v(normal(rng), normal(rng), normal(rng), normal(rng));
        const Eigen::Vector4d w = frame_rotation(b) * v;
        CHECK(w(0) == v(0));
        CHECK(w.tail<3>().norm() == doctest::Approx(v.tail<3>().norm()).epsilon(1e-14));
    }
}

TEST_CASE("weight split examples") {
    const auto eq = parallel_basis({pi / 2, 0.0});
    const auto pole = parallel_basis({0.0, 0.0});
    PauliString identity{{0, 0, 0, 0}, Frame::pauli};
    CHECK(weight_split(identity, pole) == WeightSplit{0, 0, 0});
    PauliString x{{0, 1, 0, 0}, Frame::pauli};
    CHECK(weight_split(x, eq) == WeightSplit{1, 1, 0});
    CHECK(weight_split(x, pole) == WeightSplit{1, 0, 1});
    PauliString framed{{1, 2, 3, 0, 1}, Frame::parallel};
    CHECK(weight_split(framed, eq) == WeightSplit{4, 2, 2});
    // σ^x is neither parallel nor orthogonal at a generic angle.
    CHECK_THROWS_AS(weight_split(x, parallel_basis({0.3, 0.2})), Error);
}

TEST_CASE("product state overlaps") {
    const auto rho = product_state_mps({0.0, 0.0}, 3);
    CHECK(expectation(rho, local_operator_mps(PauliLabel::z, 2, 3)) == doctest::Approx(1.0));
    const auto yplus = product_state_mps({pi / 2, pi / 2}, 3);
    CHECK(std::abs(expectation(yplus, local_operator_mps(PauliLabel::x, 2, 3))) < 1e-15);
    const auto r4 = product_state_mps({pi / 4, pi}, 4);
    OperatorMps id = local_operator_mps(PauliLabel::x, 1, 4);
    id.sites[0](0, 1, 0) = 0.0;
    id.sites[0](0, 0, 0) = 1.0;
    CHECK(expectation(r4, id) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("vectorised density matrix has self overlap 2^-L") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t L : {2u, 3u, 6u, 11u}) {
        for (int i = 0; i < 10; ++i) {
            const auto rho = product_state_mps({pi * u(rng), 2 * pi * u(rng)}, L);
            CHECK(inner(rho, rho) == doctest::Approx(std::ldexp(1.0, -int(L))).epsilon(1e-14));
        }
    }
}

TEST_CASE("degree conversion and label parsing") {
    const auto a = BlochAngles::from_degrees(90.0, 180.0);
    CHECK(a.theta == doctest::Approx(pi / 2));
    CHECK(a.phi == doctest::Approx(pi));
    CHECK(a.theta_degrees() == doctest::Approx(90.0));
    CHECK(parse_pauli_label("y") == PauliLabel::y);
    CHECK(to_char(PauliLabel::z) == 'z');
    CHECK_THROWS_AS(parse_pauli_label("w"), Error);
}
