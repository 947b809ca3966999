#include "opweight/evolution.hpp"

#include <string>

#include "opweight/error.hpp"

namespace opweight {

DenseMatrix bond_hamiltonian(const QuenchParams& p, std::size_t bond) {
    if (p.L < 2 || bond + 1 >= p.L) throw invalid_input("bond_hamiltonian: bond out of range");
    using linalg::kron;
    using linalg::pauli;
    const DenseMatrix id = pauli(0);
    const DenseMatrix x = pauli(1);
    const DenseMatrix z = pauli(3);
    const DenseMatrix field = p.g * x + p.h * z;

    auto share = [&](std::size_t site) { return (site == 0 || site + 1 == p.L) ? 1.0 : 0.5; };
    DenseMatrix h = -p.J * kron(z, z);
    h -= share(bond) * kron(field, id);
    h -= share(bond + 1) * kron(id, field);
    return h;
}

FoldedGate fold_gate(const DenseMatrix& bond_h, double tau) {
    const DenseMatrix u = linalg::expm_hermitian(bond_h, Complex{0.0, -tau});
    const DenseMatrix ud = u.adjoint();
    std::array<DenseMatrix, 16> strings;
    for (int a = 0; a < 16; ++a) {
        strings[std::size_t(a)] = linalg::kron(DenseMatrix(linalg::pauli(a / 4)), DenseMatrix(linalg::pauli(a % 4)));
    }
    FoldedGate g;
    for (int b = 0; b < 16; ++b) {
        const DenseMatrix evolved = ud * strings[std::size_t(b)] * u;
        for (int a = 0; a < 16; ++a) {
            g(a, b) = 0.25 * (strings[std::size_t(a)] * evolved).trace().real();
        }
    }
    // Unitality: 1⊗1 maps to itself and nothing else feeds it.
    g.row(0).setZero();
    g.col(0).setZero();
    g(0, 0) = 1.0;
    return g;
}

EvolutionLayer build_trotter_layer(const QuenchParams& p, double dt) {
    if (!(dt > 0.0)) throw invalid_input("build_trotter_layer: dt must be positive");
    if (p.L < 2) throw invalid_input("build_trotter_layer: need at least two sites");
    EvolutionLayer layer;
    layer.dt = dt;
    for (std::size_t bond = 0; bond + 1 < p.L; ++bond) {
        const DenseMatrix h = bond_hamiltonian(p, bond);
        if (bond % 2 == 0) {
            layer.odd_half.push_back({bond, fold_gate(h, 0.5 * dt)});
            layer.odd_full.push_back({bond, fold_gate(h, dt)});
        } else {
            layer.even_full.push_back({bond, fold_gate(h, dt)});
        }
    }
    return layer;
}

void apply_sublayer(OperatorMps& state, const std::vector<BondGate>& gates, SweepDirection dir,
                    const Truncation& trunc) {
    if (dir == SweepDirection::left_to_right) {
        for (const auto& g : gates) apply_two_site_gate(state, g.bond, g.gate, dir, trunc);
    } else {
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) apply_two_site_gate(state, it->bond, it->gate, dir, trunc);
    }
}

void advance(OperatorMps& state, const EvolutionLayer& layer, std::size_t steps, const Truncation& trunc) {
    if (steps == 0) return;
    if (state.frame != Frame::pauli) throw invalid_input("advance: evolution acts on Pauli-frame states");
    // Alternate sweep directions so the centre only travels one site between gates.
    SweepDirection dir = SweepDirection::left_to_right;
    auto flip = [&] {
        dir = dir == SweepDirection::left_to_right ? SweepDirection::right_to_left : SweepDirection::left_to_right;
    };
    const double t0 = state.time;
    for (std::size_t n = 0; n < steps; ++n) {
        state.time = t0 + double(n + 1) * layer.dt;
        apply_sublayer(state, n == 0 ? layer.odd_half : layer.odd_full, dir, trunc);
        flip();
        apply_sublayer(state, layer.even_full, dir, trunc);
        flip();
    }
    apply_sublayer(state, layer.odd_half, dir, trunc);
}

OperatorMps step(OperatorMps state, const EvolutionLayer& layer, const Truncation& trunc) {
    advance(state, layer, 1, trunc);
    return state;
}

std::size_t bond_count(std::size_t L, Boundary boundary) {
    if (boundary == Boundary::open) return L == 0 ? 0 : L - 1;
    if (L < 3) throw invalid_input("periodic chains need at least 3 sites");
    return L;
}

RealMatrix dense_hamiltonian(const QuenchParams& p, std::size_t ed_limit, Boundary boundary) {
    if (p.L < 1) throw invalid_input("dense_hamiltonian: empty chain");
    const std::size_t bonds = bond_count(p.L, boundary);
    if (p.L > ed_limit) {
        throw resource_limit("dense_hamiltonian: L=" + std::to_string(p.L) + " exceeds the ED limit " +
                             std::to_string(ed_limit));
    }
    const std::size_t dim = std::size_t{1} << p.L;
    RealMatrix h = RealMatrix::Zero(Eigen::Index(dim), Eigen::Index(dim));
    // Site 1 is the most significant bit; bit value 0 is σ^z = +1.
    auto spin = [&](std::size_t state, std::size_t site) {
        return ((state >> (p.L - 1 - site)) & 1U) ? -1.0 : 1.0;
    };
    for (std::size_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (std::size_t j = 0; j < bonds; ++j) diag -= p.J * spin(s, j) * spin(s, (j + 1) % p.L);
        for (std::size_t j = 0; j < p.L; ++j) {
            diag -= p.h * spin(s, j);
            const std::size_t flipped = s ^ (std::size_t{1} << (p.L - 1 - j));
            h(Eigen::Index(flipped), Eigen::Index(s)) -= p.g;
        }
        h(Eigen::Index(s), Eigen::Index(s)) = diag;
    }
    return h;
}

}  // namespace opweight
