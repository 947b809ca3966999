#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "opweight/evolution.hpp"
#include "opweight/pauli_basis.hpp"

namespace opweight {

/// Value of a `key = value` line: number, string, boolean or flat array.
struct ConfigValue {
    using Array = std::vector<std::variant<double, std::string>>;
    std::variant<double, std::string, bool, Array> value;
};

/// section → key → value. Keys before any section header go in "".
using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Parses the TOML subset used by the run configs: [section] headers,
/// `key = value` pairs, '#' comments, quoted strings, numbers, booleans and
/// single-line arrays. Throws config errors with line numbers.
ConfigTable parse_config(const std::string& text);
ConfigTable load_config(const std::filesystem::path& path);

struct RunConfig {
    QuenchParams model;
    EvolutionConfig evolution;

    double theta_deg = 0.0;
    double phi_deg = 0.0;
    PauliLabel op = PauliLabel::x;
    std::size_t site = 0;  // 1-based; 0 selects the centre site L/2

    std::size_t omega_max = 0;  // 0 selects L
    std::vector<std::size_t> omega_star;  // empty selects {min(12, omega_max)}
    double t_lo = 0.0;
    double t_hi = -1.0;  // negative selects t_max
    std::vector<std::size_t> omega_perp{4, 6, 8};

    std::filesystem::path out_dir = "out";
    std::size_t stride = 5;
    std::size_t checkpoint_every = 0;  // steps; 0 disables

    double dtheta_deg = 1.0;
    double dphi_deg = 1.0;
    Boundary thermal_boundary = Boundary::periodic;  // chain closure for the ED temperature

    std::vector<double> sweep_theta_deg;
    std::vector<double> sweep_phi_deg{0.0, 45.0, 90.0, 135.0, 180.0};
    std::vector<PauliLabel> sweep_operators{PauliLabel::x, PauliLabel::y, PauliLabel::z};
    std::size_t ed_sites = 10;

    std::size_t jobs = 1;

    BlochAngles angles() const { return BlochAngles::from_degrees(theta_deg, phi_deg); }
    std::size_t resolved_site() const { return site == 0 ? std::max<std::size_t>(1, model.L / 2) : site; }
    std::size_t resolved_omega_max() const { return omega_max == 0 ? model.L : omega_max; }
    std::vector<std::size_t> resolved_omega_star() const;
    double resolved_t_hi() const { return t_hi < 0.0 ? evolution.t_max : t_hi; }

    /// Throws config errors for out-of-range values.
    void validate() const;
    /// Canonical text of every resolved field; input to the config hash.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;
};

/// Applies a parsed table on top of `base`. Unknown sections or keys are errors.
RunConfig apply_config(const ConfigTable& table, RunConfig base = {});

/// "open" or "periodic".
Boundary parse_boundary(const std::string& text);

}  // namespace opweight
