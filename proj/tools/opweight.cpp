#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opweight/config.hpp"
#include "opweight/error.hpp"
#include "opweight/experiments.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::size_t jobs = 0;
    double theta = -1.0;
    double phi = -1.0;
    std::string op;
    std::size_t site = 0;
    std::size_t chi = 0;
    double dt = 0.0;
    double tmax = -1.0;
    std::size_t omega_max = 0;
    std::vector<std::size_t> omega_star;
    std::vector<std::size_t> omega_perp;
    double dtheta = 0.0;
    double dphi = 0.0;
    std::string boundary;
    bool resume = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "TOML run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--jobs", f.jobs, "worker threads");
    cmd->add_option("--theta", f.theta, "initial state polar angle, degrees");
    cmd->add_option("--phi", f.phi, "initial state azimuth, degrees");
    cmd->add_option("--operator", f.op, "initial operator")->check(CLI::IsMember({"x", "y", "z"}));
    cmd->add_option("--site", f.site, "site of the initial operator (1-based)");
    cmd->add_option("--chi", f.chi, "maximum bond dimension");
    cmd->add_option("--dt", f.dt, "Trotter step");
    cmd->add_option("--tmax", f.tmax, "final time");
    cmd->add_option("--omega-max", f.omega_max, "largest weight resolved");
    cmd->add_option("--omega-star", f.omega_star, "OWE cutoff (repeatable)");
}

opweight::RunConfig resolve(const Flags& f) {
    opweight::RunConfig cfg;
    if (!f.config.empty()) cfg = opweight::apply_config(opweight::load_config(f.config));
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.jobs > 0) cfg.jobs = f.jobs;
    if (f.theta >= 0.0) cfg.theta_deg = f.theta;
    if (f.phi >= 0.0) cfg.phi_deg = f.phi;
    if (!f.op.empty()) cfg.op = opweight::parse_pauli_label(f.op);
    if (f.site > 0) cfg.site = f.site;
    if (f.chi > 0) cfg.evolution.trunc.chi_max = f.chi;
    if (f.dt > 0.0) cfg.evolution.dt = f.dt;
    if (f.tmax >= 0.0) cfg.evolution.t_max = f.tmax;
    if (f.omega_max > 0) cfg.omega_max = f.omega_max;
    if (!f.omega_star.empty()) cfg.omega_star = f.omega_star;
    if (!f.omega_perp.empty()) cfg.omega_perp = f.omega_perp;
    if (f.dtheta > 0.0) cfg.dtheta_deg = f.dtheta;
    if (f.dphi > 0.0) cfg.dphi_deg = f.dphi;
    if (!f.boundary.empty()) cfg.thermal_boundary = opweight::parse_boundary(f.boundary);
    cfg.validate();
    return cfg;
}

int exit_code(opweight::ErrorKind kind) {
    switch (kind) {
        case opweight::ErrorKind::config:
        case opweight::ErrorKind::invalid_input: return 2;
        case opweight::ErrorKind::numerical_failure:
        case opweight::ErrorKind::protocol_incomplete: return 3;
        case opweight::ErrorKind::resource_limit: return 4;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator weight dynamics in the mixed-field Ising chain"};
    app.require_subcommand(1);
    Flags f;

    auto* tempmap = app.add_subcommand("tempmap", "equilibration temperature over the Bloch sphere");
    add_common(tempmap, f);
    tempmap->add_option("--dtheta", f.dtheta, "polar step, degrees");
    tempmap->add_option("--dphi", f.dphi, "azimuthal step, degrees");
    tempmap->add_option("--boundary", f.boundary, "chain closure for the thermal spectrum")
        ->check(CLI::IsMember({"open", "periodic"}));

    auto* evolve = app.add_subcommand("evolve", "evolve one operator and write weight-resolved channels");
    add_common(evolve, f);
    evolve->add_flag("--resume", f.resume, "continue from the checkpoint in the output directory");

    auto* backflow = app.add_subcommand("backflow", "backflow from orthogonal weight sectors");
    add_common(backflow, f);
    backflow->add_option("--omega-perp", f.omega_perp, "orthogonal weight to project on (repeatable)");

    auto* sweep = app.add_subcommand("sweep", "maximum OWE over a grid of initial states");
    add_common(sweep, f);
    sweep->add_option("--boundary", f.boundary, "chain closure for the thermal spectrum")
        ->check(CLI::IsMember({"open", "periodic"}));

    auto* verify = app.add_subcommand("verify", "compare against the dense reference at small size");
    add_common(verify, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const opweight::RunConfig cfg = resolve(f);
        if (*tempmap) opweight::run_tempmap(cfg, std::cerr);
        else if (*evolve) opweight::run_evolve(cfg, f.resume, std::cerr);
        else if (*backflow) opweight::run_backflow(cfg, std::cerr);
        else if (*sweep) opweight::run_sweep(cfg, std::cerr);
        else if (*verify) return opweight::run_verify(cfg, std::cout) == 0 ? 0 : 3;
    } catch (const opweight::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
