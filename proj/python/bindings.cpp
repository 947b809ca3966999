#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "opweight/analysis.hpp"
#include "opweight/config.hpp"
#include "opweight/error.hpp"
#include "opweight/experiments.hpp"
#include "opweight/thermo.hpp"

namespace py = pybind11;
using namespace opweight;

namespace {

using Array = py::array_t<double>;

Array to_array(const std::vector<double>& v) {
    Array out(py::ssize_t(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Array to_matrix(const std::vector<std::vector<double>>& rows, std::size_t width) {
    Array out({py::ssize_t(rows.size()), py::ssize_t(width)});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) m(py::ssize_t(i), py::ssize_t(j)) = j < rows[i].size() ? rows[i][j] : 0.0;
    return out;
}

QuenchParams params(std::size_t L, double J, double g, double h) { return {J, g, h, L}; }

Boundary boundary_of(const std::string& name) { return parse_boundary(name); }

RunConfig load(const std::string& path) { return apply_config(load_config(path)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings for the opweight C++ core";
    m.attr("__version__") = OPWEIGHT_VERSION;

    py::register_exception<Error>(m, "OpweightError");

    m.def(
        "product_state_energy",
        [](double theta, double phi, std::size_t L, double J, double g, double h, const std::string& boundary) {
            return product_state_energy({theta, phi}, params(L, J, g, h), boundary_of(boundary));
        },
        py::arg("theta"), py::arg("phi"), py::arg("L") = 10, py::arg("J") = 1.0, py::arg("g") = 1.0,
        py::arg("h") = 0.5, py::arg("boundary") = "periodic", "Tr(H rho) of the product state, angles in radians.");

    m.def(
        "solve_beta",
        [](double theta, double phi, std::size_t L, double J, double g, double h, const std::string& boundary) {
            const auto tp = solve_beta({theta, phi}, params(L, J, g, h), boundary_of(boundary));
            py::dict out;
            out["beta"] = tp.beta;
            out["temperature"] = tp.temperature;
            out["energy_density"] = tp.energy_density;
            return out;
        },
        py::arg("theta"), py::arg("phi"), py::arg("L") = 10, py::arg("J") = 1.0, py::arg("g") = 1.0,
        py::arg("h") = 0.5, py::arg("boundary") = "periodic",
        "Inverse temperature whose Gibbs energy equals the product-state energy.");

    m.def(
        "temperature_map",
        [](double dtheta_deg, double dphi_deg, std::size_t L, double J, double g, double h,
           const std::string& boundary, std::size_t jobs) {
            std::vector<TemperaturePoint> pts;
            {
                py::gil_scoped_release release;
                const ThermalSpectrum spectrum(params(L, J, g, h), boundary_of(boundary));
                pts = bloch_map(dtheta_deg, dphi_deg, spectrum, jobs);
            }
            std::vector<double> theta, phi, beta;
            for (const auto& p : pts) {
                theta.push_back(p.angles.theta_degrees());
                phi.push_back(p.angles.phi_degrees());
                beta.push_back(p.beta);
            }
            py::dict out;
            out["theta_deg"] = to_array(theta);
            out["phi_deg"] = to_array(phi);
            out["beta"] = to_array(beta);
            return out;
        },
        py::arg("dtheta_deg") = 5.0, py::arg("dphi_deg") = 5.0, py::arg("L") = 10, py::arg("J") = 1.0,
        py::arg("g") = 1.0, py::arg("h") = 0.5, py::arg("boundary") = "periodic", py::arg("jobs") = 1,
        "Equilibration temperature over the Bloch sphere, theta-major.");

    m.def(
        "trajectory",
        [](const std::string& op, std::size_t site, double theta, double phi, std::size_t L, double dt, double t_max,
           std::size_t chi, double cutoff, std::size_t omega_max, std::size_t stride, double J, double g, double h) {
            EvolutionConfig cfg;
            cfg.dt = dt;
            cfg.t_max = t_max;
            cfg.trunc.chi_max = chi;
            cfg.trunc.lambda2_cutoff = cutoff;
            const std::size_t w = omega_max == 0 ? L : omega_max;
            std::vector<TrajectorySample> samples;
            {
                py::gil_scoped_release release;
                samples = sample_trajectory(parse_pauli_label(op), site == 0 ? L / 2 : site, {theta, phi},
                                            params(L, J, g, h), cfg, w, stride);
            }
            std::vector<double> t, exact, eps, osee;
            std::vector<std::vector<double>> c, nc, contrib;
            for (const auto& s : samples) {
                t.push_back(s.t);
                exact.push_back(s.exact);
                eps.push_back(s.epsilon);
                osee.push_back(s.osee_center);
                c.push_back(s.densities.contributing);
                nc.push_back(s.densities.noncontributing);
                contrib.push_back(s.contributions);
            }
            py::dict out;
            out["t"] = to_array(t);
            out["expectation"] = to_array(exact);
            out["epsilon"] = to_array(eps);
            out["osee_center"] = to_array(osee);
            out["rho_c"] = to_matrix(c, w + 1);
            out["rho_nc"] = to_matrix(nc, w + 1);
            out["contributions"] = to_matrix(contrib, w + 1);
            return out;
        },
        py::arg("op") = "x", py::arg("site") = 0, py::arg("theta") = 0.0, py::arg("phi") = 0.0, py::arg("L") = 8,
        py::arg("dt") = 0.01, py::arg("t_max") = 1.0, py::arg("chi") = 0, py::arg("cutoff") = 0.0,
        py::arg("omega_max") = 0, py::arg("stride") = 10, py::arg("J") = 1.0, py::arg("g") = 1.0, py::arg("h") = 0.5,
        "Evolve a local Pauli operator and sample densities and contributions. site=0 picks L/2.");

    m.def(
        "owe",
        [](const std::vector<double>& contributions, double exact, std::size_t omega_star) {
            const auto s = owe_sample(contributions, exact, omega_star);
            py::dict out;
            out["owe"] = s.owe;
            out["probabilities"] = to_array(s.probabilities);
            out["converged"] = s.converged;
            return out;
        },
        py::arg("contributions"), py::arg("exact"), py::arg("omega_star"),
        "Operator weight entropy of one time slice.");

    m.def(
        "run",
        [](const std::string& command, const std::string& config, const std::string& out_dir, bool resume) {
            RunConfig cfg = config.empty() ? RunConfig{} : load(config);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            std::ostringstream log;
            py::gil_scoped_release release;
            if (command == "tempmap") {
                run_tempmap(cfg, log);
            } else if (command == "evolve") {
                run_evolve(cfg, resume, log);
            } else if (command == "backflow") {
                run_backflow(cfg, log);
            } else if (command == "sweep") {
                run_sweep(cfg, log);
            } else {
                throw invalid_input("unknown command '" + command + "'");
            }
            return log.str();
        },
        py::arg("command"), py::arg("config") = "", py::arg("out_dir") = "", py::arg("resume") = false,
        "Run a driver command from a TOML config and return its log.");
}
