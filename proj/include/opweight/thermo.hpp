#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "opweight/evolution.hpp"
#include "opweight/pauli_basis.hpp"

namespace opweight {

struct TemperaturePoint {
    BlochAngles angles;
    double beta = 0.0;         // βJ
    double temperature = 0.0;  // T/J = 1/β, infinite at β = 0
    double energy_density = 0.0;
};

/// Tr(H ρ(θ,φ)) = −J·bonds·cos²θ − gL sinθ cosφ − hL cosθ.
double product_state_energy(BlochAngles angles, const QuenchParams& p, Boundary boundary = Boundary::periodic);

/// Full ED spectrum of H, shared read-only by all thermal queries. The ring
/// is the default: its L=10 temperatures agree with much longer chains,
/// whereas open ends shift the extremes of β by about 0.09.
class ThermalSpectrum {
  public:
    explicit ThermalSpectrum(const QuenchParams& p, Boundary boundary = Boundary::periodic, std::size_t ed_limit = 12);

    /// Canonical energy Tr(H e^{-βH}) / Tr(e^{-βH}).
    double energy(double beta) const;
    /// Energy variance; equals -dE/dβ.
    double variance(double beta) const;

    double ground_energy() const { return eigenvalues_(0); }
    double top_energy() const { return eigenvalues_(eigenvalues_.size() - 1); }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const QuenchParams& params() const { return params_; }
    Boundary boundary() const { return boundary_; }

  private:
    QuenchParams params_;
    Boundary boundary_;
    Eigen::VectorXd eigenvalues_;
};

double thermal_energy(double beta, const QuenchParams& p, Boundary boundary = Boundary::periodic);

/// β with E(β) = E_PS by bisection; residual below 1e-9·L.
TemperaturePoint solve_beta(BlochAngles angles, const ThermalSpectrum& spectrum);
TemperaturePoint solve_beta(BlochAngles angles, const QuenchParams& p, Boundary boundary = Boundary::periodic);

/// θ over [0°, 180°] inclusive and φ over [0°, 360°), θ-major. Steps in degrees.
std::vector<TemperaturePoint> bloch_map(double dtheta_deg, double dphi_deg, const ThermalSpectrum& spectrum,
                                        std::size_t jobs = 1);

}  // namespace opweight
