#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "opweight/analysis.hpp"
#include "opweight/evolution.hpp"
#include "opweight/linalg.hpp"
#include "opweight/mps.hpp"
#include "opweight/pauli_basis.hpp"

/// Dense brute-force reference: operators as 4^L coefficient vectors. Every
/// routine here is built from Kronecker products and string enumeration and
/// shares no contraction code with the tensor-network path.
namespace opweight::oracle {

inline constexpr std::size_t kMaxSites = 7;
/// H itself lives on 2^L states, so it scales further than operator vectors.
inline constexpr std::size_t kMaxHamiltonianSites = 12;

/// Base-4 string index, site 1 is the most significant digit.
struct DenseOperatorVector {
    std::size_t L = 0;
    Eigen::VectorXd coefficients;
    Frame frame = Frame::pauli;
    std::optional<BlochAngles> angles;
};

DenseOperatorVector local_operator(PauliLabel op, std::size_t site, std::size_t L);

/// Vectorised ρ(θ,φ), site vector (1, n)/2.
DenseOperatorVector product_state(BlochAngles angles, std::size_t L);

DenseOperatorVector from_mps(const OperatorMps& state);

/// Σ_s c_s σ_s as a 2^L × 2^L matrix (Pauli frame only).
DenseMatrix to_matrix(const DenseOperatorVector& op);

/// c_s = 2^{-L} Tr(σ_s X), extracted site by site.
DenseOperatorVector from_matrix(const DenseMatrix& m, std::size_t L);

/// H from explicit Kronecker products of single-site Paulis, up to kMaxHamiltonianSites.
DenseMatrix hamiltonian(const QuenchParams& p);

/// e^{iHt} O e^{-iHt} by eigendecomposition.
DenseOperatorVector exact_heisenberg(const DenseOperatorVector& op, const QuenchParams& p, double t);

/// Precomputed eigendecomposition for repeated exact evolution.
class ExactPropagator {
  public:
    explicit ExactPropagator(const QuenchParams& p);
    DenseOperatorVector evolve(const DenseOperatorVector& op, double t) const;

  private:
    QuenchParams params_;
    Eigen::VectorXd energies_;
    DenseMatrix vectors_;
};

/// Second-order Trotter circuit on the Hilbert space: per step
/// U = e^{-iH_A dt/2} e^{-iH_B dt} e^{-iH_A dt/2}, A the bonds (1,2), (3,4), ...
/// Fields are shared equally between the bonds touching a site.
class TrotterPropagator {
  public:
    TrotterPropagator(const QuenchParams& p, double dt);
    /// Heisenberg action of `steps` Trotter steps.
    DenseOperatorVector evolve(const DenseOperatorVector& op, std::size_t steps) const;
    DenseMatrix evolve_matrix(const DenseMatrix& op, std::size_t steps) const;

  private:
    std::size_t L_;
    DenseMatrix step_;
};

DenseOperatorVector to_parallel(const DenseOperatorVector& op, const ParallelBasis& basis);
DenseOperatorVector to_pauli(const DenseOperatorVector& op, const ParallelBasis& basis);

enum class SectorKind { total, parallel, orthogonal };

/// Keeps the coefficients whose weight of the requested kind equals ω. For
/// the parallel and orthogonal kinds the result is in the basis frame.
DenseOperatorVector exact_weight_sector(const DenseOperatorVector& op, SectorKind kind, std::size_t omega,
                                        const std::optional<ParallelBasis>& basis = std::nullopt);

/// Strings with / without orthogonal insertions, in the basis frame.
DenseOperatorVector contributing_part(const DenseOperatorVector& op, const ParallelBasis& basis);
DenseOperatorVector noncontributing_part(const DenseOperatorVector& op, const ParallelBasis& basis);

WeightDensities densities(const DenseOperatorVector& op, const ParallelBasis& basis, std::size_t omega_max);
std::vector<double> contributions(const DenseOperatorVector& op, const ParallelBasis& basis, std::size_t omega_max);

/// ⟨ψ|O|ψ⟩ for the pure product state |θ,φ⟩.
double expectation(const DenseOperatorVector& op, BlochAngles angles);

/// Schmidt values of the coefficient vector split after `cut` sites.
Eigen::VectorXd schmidt_values(const DenseOperatorVector& op, std::size_t cut);
double osee(const DenseOperatorVector& op, std::size_t cut);

/// W·v for an MPO acting on a dense vector.
Eigen::VectorXd apply_mpo(const Mpo& mpo, const Eigen::VectorXd& v);

struct OweTrajectory {
    std::vector<double> times;
    std::vector<double> exact;
    std::vector<std::vector<double>> contributions;
    std::vector<double> owe;
    std::vector<std::vector<double>> probabilities;
};

/// Dense OWE trajectory with exact evolution (no Trotter, no truncation).
OweTrajectory exact_owe_pipeline(BlochAngles angles, PauliLabel op, std::size_t site, const QuenchParams& p,
                                 const std::vector<double>& times, std::size_t omega_star);

struct BackflowTrace {
    std::size_t peak_step = 0;
    double t0 = 0.0;
    std::vector<double> monitor_density;
    std::vector<double> times;
    std::vector<double> overlaps;
    std::vector<double> osee;
};

/// Dense backflow protocol on the Hilbert-space Trotter circuit. Throws
/// ProtocolIncomplete when the monitored density never peaks.
BackflowTrace backflow(PauliLabel op, std::size_t site, const ParallelBasis& basis, std::size_t omega_perp,
                       const QuenchParams& p, double dt, double t_max);

}  // namespace opweight::oracle
