#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "opweight/linalg.hpp"
#include "opweight/pauli_basis.hpp"

namespace opweight {

inline constexpr std::size_t kPhysicalDim = 4;

/// Rank-3 site tensor (left bond, physical 4, right bond), row-major.
struct SiteTensor {
    std::size_t left = 1;
    std::size_t right = 1;
    std::vector<double> data;

    SiteTensor() : data(kPhysicalDim, 0.0) {}
    SiteTensor(std::size_t l, std::size_t r) : left(l), right(r), data(l * kPhysicalDim * r, 0.0) {}

    double& operator()(std::size_t l, std::size_t p, std::size_t r) { return data[(l * kPhysicalDim + p) * right + r]; }
    double operator()(std::size_t l, std::size_t p, std::size_t r) const {
        return data[(l * kPhysicalDim + p) * right + r];
    }

    /// (left·4) × right view.
    Eigen::Map<RowMatrix> left_matrix() { return {data.data(), Eigen::Index(left * 4), Eigen::Index(right)}; }
    Eigen::Map<const RowMatrix> left_matrix() const {
        return {data.data(), Eigen::Index(left * 4), Eigen::Index(right)};
    }
    /// left × (4·right) view.
    Eigen::Map<RowMatrix> right_matrix() { return {data.data(), Eigen::Index(left), Eigen::Index(4 * right)}; }
    Eigen::Map<const RowMatrix> right_matrix() const {
        return {data.data(), Eigen::Index(left), Eigen::Index(4 * right)};
    }
    /// left × right matrix of physical component p.
    Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>> slice(std::size_t p) const {
        return {data.data() + p * right, Eigen::Index(left), Eigen::Index(right),
                Eigen::OuterStride<>(Eigen::Index(4 * right))};
    }
};

/// Truncation knobs for every SVD split. chi_max = 0 means uncapped; the
/// λ² cutoff is relative to the squared norm at the bond being split.
struct Truncation {
    std::size_t chi_max = 0;
    double lambda2_cutoff = 0.0;
    std::size_t hard_cap = 4096;
};

/// Relative λ² floor applied on every split even without truncation, so that
/// numerically-zero Schmidt values do not inflate bonds.
inline constexpr double kNumericalZero = 1e-28;

struct DiscardEvent {
    double time = 0.0;
    std::size_t bond = 0;  // left site of the split bond, 0-based
    double weight = 0.0;
};

/// Accumulated discarded squared Schmidt weight ε.
struct TruncationLedger {
    double epsilon = 0.0;
    std::vector<DiscardEvent> per_step;

    void record(double time, std::size_t bond, double weight) {
        if (weight <= 0.0) return;
        epsilon += weight;
        per_step.push_back({time, bond, weight});
    }
};

/// A vectorised Hermitian operator: real amplitudes over Pauli-type strings,
/// normalised so that ⟨A|B⟩ = 2^{-L} Tr(A†B) is the plain dot product.
struct OperatorMps {
    std::vector<SiteTensor> sites;
    Frame frame = Frame::pauli;
    std::optional<BlochAngles> frame_angles;  // set when frame == parallel
    TruncationLedger ledger;
    std::optional<std::size_t> center;  // orthogonality centre, if known
    double time = 0.0;

    std::size_t length() const { return sites.size(); }
    std::size_t max_bond() const;
    std::vector<std::size_t> bond_dimensions() const;
    /// Throws invalid_input on inconsistent bonds or non-finite entries.
    void validate() const;
};

/// Rank-4 MPO tensor (left, out 4, in 4, right), row-major.
struct MpoTensor {
    std::size_t left = 1;
    std::size_t right = 1;
    std::vector<double> data;

    MpoTensor() : data(16, 0.0) {}
    MpoTensor(std::size_t l, std::size_t r) : left(l), right(r), data(l * 16 * r, 0.0) {}

    double& operator()(std::size_t l, std::size_t o, std::size_t i, std::size_t r) {
        return data[((l * 4 + o) * 4 + i) * right + r];
    }
    double operator()(std::size_t l, std::size_t o, std::size_t i, std::size_t r) const {
        return data[((l * 4 + o) * 4 + i) * right + r];
    }
};

/// Boundary vectors are absorbed: first left and last right dimension are 1.
struct Mpo {
    std::vector<MpoTensor> sites;

    std::size_t length() const { return sites.size(); }
    std::size_t max_bond() const;
    std::vector<std::size_t> bond_dimensions() const;
};

/// Single Pauli at `site` (1-based), identity elsewhere. Unit norm.
OperatorMps local_operator_mps(PauliLabel op, std::size_t site, std::size_t L);

/// Vectorised ρ(θ,φ) in the Pauli frame: site vector (1, n_x, n_y, n_z)/2.
OperatorMps product_state_mps(BlochAngles angles, std::size_t L);

double inner(const OperatorMps& a, const OperatorMps& b);

/// Tr(ρ O) = 2^L ⟨ρ|O⟩ for a vectorised density matrix ρ.
double expectation(const OperatorMps& rho, const OperatorMps& op);

/// ⟨bra| W |ket⟩, exact contraction.
double sandwich(const OperatorMps& bra, const Mpo& mpo, const OperatorMps& ket);

OperatorMps apply_mpo(const Mpo& mpo, const OperatorMps& state, const Truncation& trunc);

/// Moves the orthogonality centre to `site` (0-based) with QR steps.
void move_center(OperatorMps& state, std::size_t site);

/// Canonicalises and truncates every bond with a right-to-left SVD sweep.
void compress(OperatorMps& state, const Truncation& trunc);

using FoldedGate = Eigen::Matrix<double, 16, 16, Eigen::RowMajor>;

enum class SweepDirection { left_to_right, right_to_left };

/// Applies a two-site gate on sites (bond, bond+1) and re-splits with a
/// truncated SVD. Left-to-right leaves the centre on bond+1, right-to-left on
/// bond. Discarded weight goes to the ledger.
void apply_two_site_gate(OperatorMps& state, std::size_t bond, const FoldedGate& gate, SweepDirection dir,
                         const Truncation& trunc);

/// Schmidt values across the cut with `cut` sites on the left (1 ≤ cut < L).
Eigen::VectorXd schmidt_values(const OperatorMps& state, std::size_t cut);

/// Operator space entanglement entropy (natural log) at a cut, with the
/// Schmidt spectrum normalised by its retained weight.
double osee(const OperatorMps& state, std::size_t cut);

/// OSEE at every cut 1..L-1 (entry cut-1).
std::vector<double> osee_profile(const OperatorMps& state);

/// Applies a 4×4 map to every physical leg.
OperatorMps rotate_sites(const OperatorMps& state, const Eigen::Matrix4d& rotation, Frame target,
                         std::optional<BlochAngles> target_angles);
OperatorMps to_parallel_frame(const OperatorMps& state, const ParallelBasis& basis);
OperatorMps to_pauli_frame(const OperatorMps& state, const ParallelBasis& basis);

Mpo identity_mpo(std::size_t L);

/// (a·b) as an MPO: b acts first.
Mpo mpo_product(const Mpo& a, const Mpo& b);

/// SVD compression of an MPO with a relative λ² threshold.
Mpo compress_mpo(const Mpo& mpo, double lambda2_cutoff);

}  // namespace opweight
