#include "opweight/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "opweight/error.hpp"
#include "opweight/linalg.hpp"

namespace opweight {
namespace {

// Weights e^{-β(E_i - E_ref)} with E_ref the dominant edge of the spectrum.
struct Boltzmann {
    double reference;
    Eigen::ArrayXd weights;
};

Boltzmann boltzmann(const Eigen::VectorXd& e, double beta) {
    const double ref = beta >= 0.0 ? e(0) : e(e.size() - 1);
    return {ref, (-beta * (e.array() - ref)).exp()};
}

std::size_t grid_count(double range, double step, const char* name) {
    if (!(step > 0.0)) throw invalid_input(std::string(name) + " step must be positive");
    const double n = range / step;
    if (std::abs(n - std::round(n)) > 1e-9) throw invalid_input(std::string(name) + " step must divide its range");
    return static_cast<std::size_t>(std::llround(n));
}

}  // namespace

double product_state_energy(BlochAngles angles, const QuenchParams& p, Boundary boundary) {
    const double L = double(p.L);
    const double bonds = double(bond_count(p.L, boundary));
    const double c = std::cos(angles.theta);
    const double s = std::sin(angles.theta);
    return -p.J * bonds * c * c - p.g * L * s * std::cos(angles.phi) - p.h * L * c;
}

ThermalSpectrum::ThermalSpectrum(const QuenchParams& p, Boundary boundary, std::size_t ed_limit)
    : params_(p), boundary_(boundary) {
    const RealMatrix h = dense_hamiltonian(p, ed_limit, boundary);
    eigenvalues_ = linalg::eigh(h).eigenvalues;
}

double ThermalSpectrum::energy(double beta) const {
    const Boltzmann b = boltzmann(eigenvalues_, beta);
    const Eigen::ArrayXd shifted = eigenvalues_.array() - b.reference;
    return b.reference + (shifted * b.weights).sum() / b.weights.sum();
}

double ThermalSpectrum::variance(double beta) const {
    const Boltzmann b = boltzmann(eigenvalues_, beta);
    const double z = b.weights.sum();
    const Eigen::ArrayXd shifted = eigenvalues_.array() - b.reference;
    const double mean = (shifted * b.weights).sum() / z;
    return ((shifted - mean).square() * b.weights).sum() / z;
}

double thermal_energy(double beta, const QuenchParams& p, Boundary boundary) {
    return ThermalSpectrum(p, boundary).energy(beta);
}

TemperaturePoint solve_beta(BlochAngles angles, const ThermalSpectrum& spectrum) {
    const QuenchParams& p = spectrum.params();
    const double target = product_state_energy(angles, p, spectrum.boundary());
    if (!(target > spectrum.ground_energy() && target < spectrum.top_energy())) {
        throw numerical_failure("solve_beta: product-state energy outside the spectrum");
    }
    const double tol = 1e-9 * double(p.L);

    double lo = -20.0;
    double hi = 20.0;
    while (spectrum.energy(hi) > target) {
        hi *= 2.0;
        if (hi > 1e6) throw numerical_failure("solve_beta: no bracket for positive beta");
    }
    while (spectrum.energy(lo) < target) {
        lo *= 2.0;
        if (lo < -1e6) throw numerical_failure("solve_beta: no bracket for negative beta");
    }

    double beta = 0.5 * (lo + hi);
    double best = beta;
    double best_residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
        beta = 0.5 * (lo + hi);
        const double f = spectrum.energy(beta) - target;
        if (std::abs(f) < best_residual) {
            best_residual = std::abs(f);
            best = beta;
        }
        if (std::abs(f) < tol) break;
        if (f > 0.0) {
            lo = beta;
        } else {
            hi = beta;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    }
    if (best_residual >= tol) throw numerical_failure("solve_beta: bisection did not reach the residual tolerance");

    TemperaturePoint out;
    out.angles = angles;
    out.beta = best;
    out.temperature = best == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / best;
    out.energy_density = target / double(p.L);
    return out;
}

TemperaturePoint solve_beta(BlochAngles angles, const QuenchParams& p, Boundary boundary) {
    return solve_beta(angles, ThermalSpectrum(p, boundary));
}

std::vector<TemperaturePoint> bloch_map(double dtheta_deg, double dphi_deg, const ThermalSpectrum& spectrum,
                                        std::size_t jobs) {
    const std::size_t n_theta = grid_count(180.0, dtheta_deg, "theta") + 1;
    const std::size_t n_phi = grid_count(360.0, dphi_deg, "phi");
    std::vector<TemperaturePoint> out(n_theta * n_phi);
    jobs = std::max<std::size_t>(1, std::min(jobs, n_theta));

    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < n_theta; i += jobs) {
            for (std::size_t j = 0; j < n_phi; ++j) {
                const BlochAngles a = BlochAngles::from_degrees(double(i) * dtheta_deg, double(j) * dphi_deg);
                out[i * n_phi + j] = solve_beta(a, spectrum);
            }
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (std::size_t w = 0; w < jobs; ++w) {
            pool.emplace_back([&, w] {
                try {
                    work(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return out;
}

}  // namespace opweight
