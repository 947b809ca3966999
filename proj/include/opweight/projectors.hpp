#pragma once

#include <cstddef>
#include <optional>

#include "opweight/mps.hpp"
#include "opweight/pauli_basis.hpp"

namespace opweight {

enum class ProjectorKind { contributing, noncontributing, weight, parallel_weight, orthogonal_weight, product };

/// A diagonal projector on Pauli strings written as an MPO. Entries are
/// expressed in the basis frame when `basis` is set; states must be rotated
/// with to_parallel_frame before the projector is applied.
struct ProjectorMpo {
    Mpo mpo;
    ProjectorKind kind = ProjectorKind::weight;
    std::size_t omega = 0;
    std::optional<ParallelBasis> basis;
    bool zero_warning = false;  // requested weight exceeds the chain length
};

/// ⊗ (|1⟩⟨1| + |∥⟩⟨∥|): strings without orthogonal insertions. Bond dimension 1.
ProjectorMpo contributing_projector(const ParallelBasis& basis, std::size_t L);

/// Strings with at least one orthogonal insertion. Bond dimension 2; the
/// internal state flips on the first ⊥ insertion.
ProjectorMpo noncontributing_projector(const ParallelBasis& basis, std::size_t L);

/// Strings with exactly `omega` non-identity insertions. Bond dimension ω+1,
/// upper-bidiagonal transfer tensor. Frame independent.
ProjectorMpo weight_projector(std::size_t omega, std::size_t L);

/// Exactly `omega` insertions of the counted kind (parallel or orthogonal),
/// any number of insertions of the other kind.
ProjectorMpo sector_projector(ProjectorKind kind, std::size_t omega, const ParallelBasis& basis, std::size_t L);

/// P^nc · P_{ω=ω⊥}, compressed.
ProjectorMpo backflow_projector(std::size_t omega_perp, const ParallelBasis& basis, std::size_t L);

/// Checks frames and applies the projector.
OperatorMps apply_projector(const ProjectorMpo& projector, const OperatorMps& state, const Truncation& trunc);

}  // namespace opweight
