#pragma once

#include <cstddef>
#include <vector>

#include "opweight/error.hpp"
#include "opweight/evolution.hpp"
#include "opweight/mps.hpp"
#include "opweight/pauli_basis.hpp"

namespace opweight {

/// ρ^c_ω and ρ^nc_ω for ω = 0..omega_max.
struct WeightDensities {
    std::vector<double> contributing;
    std::vector<double> noncontributing;
};

/// Weight-resolved densities ⟨O|P^{c/nc} P_ω|O⟩. Both projectors are diagonal,
/// so all ω are contracted in one pass with a (weight count, ⊥ seen) counter.
WeightDensities densities(const OperatorMps& state, const ParallelBasis& basis, std::size_t omega_max);

/// Direct contributions O_ω = ⟨ρ|P_ω P^c|O⟩ for ω = 0..omega_max, where ρ is the
/// product state the basis was built from (normalised as Tr ρ = 1).
std::vector<double> direct_contributions(const OperatorMps& state, const ParallelBasis& basis,
                                         std::size_t omega_max);

/// Tr(ρ O) for the product state of `basis`.
double product_expectation(const OperatorMps& state, const ParallelBasis& basis);

/// Below this N the weight sum is treated as converged and OWE is 0.
inline constexpr double kConvergedDeviation = 1e-12;

struct OweSample {
    double owe = 0.0;
    std::vector<double> probabilities;  // p_1..p_{ω*}
    std::vector<double> deviations;     // d_1..d_{ω*}
    double normalisation = 0.0;
    bool converged = false;
};

/// OWE from one time slice: contributions indexed by ω from 0, `exact` the
/// full expectation value.
OweSample owe_sample(const std::vector<double>& contributions, double exact, std::size_t omega_star);

struct ContributionSeries {
    std::vector<double> times;
    std::vector<double> exact;
    std::vector<std::vector<double>> contributions;  // [time][ω]
};

struct OweSeries {
    std::size_t omega_star = 0;
    std::vector<double> times;
    std::vector<double> owe;
    std::vector<std::vector<double>> probabilities;
    std::vector<bool> converged;
};

OweSeries owe(const ContributionSeries& series, std::size_t omega_star);

struct OweMaximum {
    double value = 0.0;
    double time = 0.0;
};

/// Largest OWE over times in [t_lo, t_hi]; the earliest time wins ties.
OweMaximum max_owe(const OweSeries& series, double t_lo, double t_hi);

struct BackflowRecord {
    std::size_t omega_perp = 0;
    double t0 = 0.0;          // grid time of the peak
    double t0_refined = 0.0;  // 3-point parabolic vertex
    double peak_density = 0.0;
    std::vector<double> monitor_times;
    std::vector<double> monitor_density;
    std::vector<double> times;     // t ≥ t0
    std::vector<double> overlaps;  // |⟨ρ|O_back(t)⟩|
    std::vector<double> osee;      // central cut
};

/// Raised when the monitored density never peaks before t_max.
class ProtocolIncomplete : public Error {
  public:
    ProtocolIncomplete(const std::string& what, std::vector<double> times, std::vector<double> density)
        : Error(ErrorKind::protocol_incomplete, what), times_(std::move(times)), density_(std::move(density)) {}
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& density() const { return density_; }

  private:
    std::vector<double> times_;
    std::vector<double> density_;
};

/// Index k of the first local maximum of a sampled series: the forward
/// difference is rising at k-1 and not rising at k. Returns 0 when none.
std::size_t first_peak(const std::vector<double>& values, double rise_tolerance);

/// Vertex offset (in units of the grid step) of the parabola through three points.
double parabolic_offset(double left, double mid, double right);

/// Backflow protocol: evolve, monitor ρ^nc at weight ω⊥, project at its first
/// peak, and follow the projected vector. Samples every `stride` steps after t0.
BackflowRecord backflow(PauliLabel op, std::size_t site, const ParallelBasis& basis, std::size_t omega_perp,
                        const QuenchParams& params, const EvolutionConfig& config, std::size_t stride = 1);

}  // namespace opweight
