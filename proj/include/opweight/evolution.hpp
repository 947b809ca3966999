#pragma once

#include <cstddef>
#include <vector>

#include "opweight/linalg.hpp"
#include "opweight/mps.hpp"

namespace opweight {

/// Mixed-field Ising chain H = -Σ J σ^z_j σ^z_{j+1} - Σ (g σ^x_j + h σ^z_j),
/// open boundaries. Energies in units of J.
struct QuenchParams {
    double J = 1.0;
    double g = 1.0;
    double h = 0.5;
    std::size_t L = 10;
};

struct EvolutionConfig {
    double dt = 0.01;
    Truncation trunc;
    double t_max = 1.0;
};

struct BondGate {
    std::size_t bond = 0;  // left site, 0-based
    FoldedGate gate;
};

/// Gates of one second-order step: half steps on odd bonds (1-2, 3-4, ... in
/// 1-based site numbering) around a full step on even bonds. `odd_full` is
/// the fused pair of odd half steps used between consecutive steps.
struct EvolutionLayer {
    double dt = 0.0;
    std::vector<BondGate> odd_half;
    std::vector<BondGate> even_full;
    std::vector<BondGate> odd_full;
};

/// 4×4 bond Hamiltonian. Each site's field is shared equally between the
/// bonds touching it; a chain end gives its whole field to its single bond.
DenseMatrix bond_hamiltonian(const QuenchParams& p, std::size_t bond);

/// Heisenberg action a ↦ u† a u of u = exp(-i h τ), as a real 16×16 matrix on
/// two-site Pauli components (index 4·left + right).
FoldedGate fold_gate(const DenseMatrix& bond_h, double tau);

EvolutionLayer build_trotter_layer(const QuenchParams& p, double dt);

/// Applies one sublayer of disjoint gates with a single canonical sweep.
void apply_sublayer(OperatorMps& state, const std::vector<BondGate>& gates, SweepDirection dir,
                    const Truncation& trunc);

/// Advances the Heisenberg time by `steps`·dt. Odd half steps between
/// consecutive steps are fused; the state is unfused at both ends.
void advance(OperatorMps& state, const EvolutionLayer& layer, std::size_t steps, const Truncation& trunc);

/// One Trotter step on a copy.
OperatorMps step(OperatorMps state, const EvolutionLayer& layer, const Truncation& trunc);

/// Chain closure. Evolution always uses open chains; the thermal problem can
/// use a ring as a bulk proxy.
enum class Boundary { open, periodic };

/// Number of nearest-neighbour bonds: L−1 open, L periodic (rings need L ≥ 3).
std::size_t bond_count(std::size_t L, Boundary boundary);

/// Dense 2^L × 2^L Hamiltonian (real symmetric). Throws resource_limit above
/// `ed_limit` sites.
RealMatrix dense_hamiltonian(const QuenchParams& p, std::size_t ed_limit = 12, Boundary boundary = Boundary::open);

}  // namespace opweight
