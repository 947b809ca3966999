#include "opweight/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "opweight/checkpoint.hpp"
#include "opweight/error.hpp"
#include "opweight/oracle.hpp"
#include "opweight/projectors.hpp"
#include "opweight/thermo.hpp"

#ifndef OPWEIGHT_VERSION
#define OPWEIGHT_VERSION "unknown"
#endif

namespace opweight {
namespace {

std::size_t step_count(double t_max, double dt) { return static_cast<std::size_t>(std::llround(t_max / dt)); }

std::string time_text(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", t);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, bool append) {
    std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
    if (!f) throw invalid_input("cannot write " + path.string());
    return f;
}

// Keeps comment/header lines and rows whose leading time is at most
// `last_step`, dropping anything written after the checkpoint.
void truncate_rows(const std::filesystem::path& path, std::size_t last_step, double dt) {
    std::ifstream in(path);
    if (!in) throw invalid_input("resume: missing " + path.string());
    std::string kept;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#' || !header_seen) {
            if (line[0] != '#') header_seen = true;
            kept += line + '\n';
            continue;
        }
        const double t = std::stod(line.substr(0, line.find(',')));
        if (std::llround(t / dt) <= static_cast<long long>(last_step)) kept += line + '\n';
    }
    in.close();
    std::ofstream out(path, std::ios::trunc);
    out << kept;
}

template <typename Work>
void parallel_for(std::size_t n, std::size_t jobs, Work&& work) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += jobs) work(i);
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

std::vector<double> default_sweep_thetas() {
    std::vector<double> out;
    for (int k = 0; k < 40; ++k) out.push_back(4.5 * k);
    return out;
}

}  // namespace

std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_provenance(const RunConfig& cfg) {
    return "# config_hash=" + cfg.hash() + " version=" + OPWEIGHT_VERSION;
}

TrajectorySample sample_state(const OperatorMps& state, std::size_t step, double dt, const ParallelBasis& basis,
                              std::size_t omega_max) {
    TrajectorySample s;
    s.step = step;
    s.t = double(step) * dt;
    const OperatorMps rotated = to_parallel_frame(state, basis);
    s.exact = product_expectation(rotated, basis);
    s.densities = densities(rotated, basis, omega_max);
    s.contributions = direct_contributions(rotated, basis, omega_max);
    s.epsilon = state.ledger.epsilon;
    s.max_bond = state.max_bond();
    s.osee_center = state.length() >= 2 ? osee(state, state.length() / 2) : 0.0;
    return s;
}

void run_steps(OperatorMps& state, const EvolutionLayer& layer, std::size_t first_step, std::size_t last_step,
               std::size_t stride, const Truncation& trunc,
               const std::function<void(const OperatorMps&, std::size_t)>& visit) {
    if (stride < 1) throw invalid_input("run_steps: stride must be at least 1");
    std::size_t k = first_step;
    while (k < last_step) {
        const std::size_t chunk = std::min(stride - k % stride, last_step - k);
        advance(state, layer, chunk, trunc);
        k += chunk;
        visit(state, k);
    }
}

std::vector<TrajectorySample> sample_trajectory(PauliLabel op, std::size_t site, BlochAngles angles,
                                                const QuenchParams& params, const EvolutionConfig& config,
                                                std::size_t omega_max, std::size_t stride) {
    const ParallelBasis basis = parallel_basis(angles);
    const EvolutionLayer layer = build_trotter_layer(params, config.dt);
    OperatorMps state = local_operator_mps(op, site, params.L);
    std::vector<TrajectorySample> out{sample_state(state, 0, config.dt, basis, omega_max)};
    run_steps(state, layer, 0, step_count(config.t_max, config.dt), stride, config.trunc,
              [&](const OperatorMps& s, std::size_t k) { out.push_back(sample_state(s, k, config.dt, basis, omega_max)); });
    return out;
}

ContributionSeries contribution_series(const std::vector<TrajectorySample>& samples) {
    ContributionSeries out;
    for (const auto& s : samples) {
        out.times.push_back(s.t);
        out.exact.push_back(s.exact);
        out.contributions.push_back(s.contributions);
    }
    return out;
}

std::size_t run_tempmap(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const ThermalSpectrum spectrum(cfg.model, cfg.thermal_boundary);
    const auto points = bloch_map(cfg.dtheta_deg, cfg.dphi_deg, spectrum, cfg.jobs);
    auto f = open_csv(cfg.out_dir / "tempmap.csv", false);
    f << csv_provenance(cfg) << '\n' << "theta_deg,phi_deg,beta_J,T_J,energy_per_site\n";
    const std::size_t n_phi = static_cast<std::size_t>(std::llround(360.0 / cfg.dphi_deg));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const double theta = double(i / n_phi) * cfg.dtheta_deg;
        const double phi = double(i % n_phi) * cfg.dphi_deg;
        f << csv_number(theta) << ',' << csv_number(phi) << ',' << csv_number(p.beta) << ','
          << (std::isinf(p.temperature) ? std::string("inf") : csv_number(p.temperature)) << ','
          << csv_number(p.energy_density) << '\n';
    }
    log << "tempmap: " << points.size() << " points written to " << (cfg.out_dir / "tempmap.csv").string() << '\n';
    return points.size();
}

void run_evolve(const RunConfig& cfg, bool resume, std::ostream& log) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const ParallelBasis basis = parallel_basis(cfg.angles());
    const EvolutionLayer layer = build_trotter_layer(cfg.model, cfg.evolution.dt);
    const std::size_t omega_max = cfg.resolved_omega_max();
    const auto stars = cfg.resolved_omega_star();
    const std::size_t widest = *std::max_element(stars.begin(), stars.end());
    const std::size_t total = step_count(cfg.evolution.t_max, cfg.evolution.dt);
    const double dt = cfg.evolution.dt;

    const auto dens_path = cfg.out_dir / "densities.csv";
    const auto contrib_path = cfg.out_dir / "contributions.csv";
    const auto owe_path = cfg.out_dir / "owe.csv";
    const auto obs_path = cfg.out_dir / "observables.csv";
    const auto ckpt = cfg.out_dir / "checkpoint";

    OperatorMps state;
    std::size_t start = 0;
    if (resume) {
        nlohmann::json meta;
        state = read_checkpoint(ckpt, meta);
        if (meta.value("config_hash", std::string()) != cfg.hash()) {
            throw config_error("resume: checkpoint was written by a different configuration");
        }
        start = meta.at("step").get<std::size_t>();
        for (const auto& p : {dens_path, contrib_path, owe_path, obs_path}) truncate_rows(p, start, dt);
        log << "evolve: resuming at step " << start << " (t=" << time_text(double(start) * dt) << ")\n";
    } else {
        state = local_operator_mps(cfg.op, cfg.resolved_site(), cfg.model.L);
    }

    auto dens = open_csv(dens_path, resume);
    auto contrib = open_csv(contrib_path, resume);
    auto owe_csv = open_csv(owe_path, resume);
    auto obs = open_csv(obs_path, resume);
    if (!resume) {
        const std::string prov = csv_provenance(cfg) + '\n';
        dens << prov << "t,kind,omega,value\n";
        contrib << prov << "t,omega,value\n";
        owe_csv << prov << "t,omega_star,owe";
        for (std::size_t i = 1; i <= widest; ++i) owe_csv << ",p" << i;
        owe_csv << '\n';
        obs << prov << "t,expectation,epsilon,max_bond,osee_center\n";
    }

    auto emit = [&](const OperatorMps& s, std::size_t k) {
        const TrajectorySample smp = sample_state(s, k, dt, basis, omega_max);
        const std::string t = time_text(smp.t);
        for (std::size_t w = 0; w <= omega_max; ++w) dens << t << ",c," << w << ',' << csv_number(smp.densities.contributing[w]) << '\n';
        for (std::size_t w = 0; w <= omega_max; ++w) dens << t << ",nc," << w << ',' << csv_number(smp.densities.noncontributing[w]) << '\n';
        for (std::size_t w = 0; w <= omega_max; ++w) contrib << t << ',' << w << ',' << csv_number(smp.contributions[w]) << '\n';
        for (std::size_t star : stars) {
            const OweSample o = owe_sample(smp.contributions, smp.exact, star);
            owe_csv << t << ',' << star << ',' << csv_number(o.owe);
            for (std::size_t i = 0; i < widest; ++i) {
                owe_csv << ',';
                if (i < star && !o.converged) owe_csv << csv_number(o.probabilities[i]);
            }
            owe_csv << '\n';
        }
        obs << t << ',' << csv_number(smp.exact) << ',' << csv_number(smp.epsilon) << ',' << smp.max_bond << ','
            << csv_number(smp.osee_center) << '\n';
        for (auto* f : {&dens, &contrib, &owe_csv, &obs}) {
            f->flush();
            if (!*f) throw invalid_input("evolve: write failed");
        }
        if (cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0) {
            write_checkpoint(ckpt, s, {{"step", k}, {"config_hash", cfg.hash()}, {"version", OPWEIGHT_VERSION}});
        }
    };

    if (!resume) emit(state, 0);
    run_steps(state, layer, start, total, cfg.stride, cfg.evolution.trunc, emit);
    log << "evolve: " << total << " steps, final epsilon " << csv_number(state.ledger.epsilon) << ", max bond "
        << state.max_bond() << '\n';
}

void run_backflow(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    for (std::size_t w : cfg.omega_perp) {
        if (w < 1 || w > cfg.model.L) throw config_error("analysis.omega_perp must lie in [1, L]");
    }
    std::filesystem::create_directories(cfg.out_dir);
    const ParallelBasis basis = parallel_basis(cfg.angles());
    auto f = open_csv(cfg.out_dir / "backflow.csv", false);
    f << csv_provenance(cfg) << '\n' << "omega_perp,t0,t,overlap_abs,osee\n";
    for (std::size_t w : cfg.omega_perp) {
        try {
            const BackflowRecord r =
                backflow(cfg.op, cfg.resolved_site(), basis, w, cfg.model, cfg.evolution, cfg.stride);
            for (std::size_t i = 0; i < r.times.size(); ++i) {
                f << w << ',' << time_text(r.t0) << ',' << time_text(r.times[i]) << ',' << csv_number(r.overlaps[i])
                  << ',' << csv_number(r.osee[i]) << '\n';
            }
            log << "backflow: omega_perp=" << w << " peak at t0=" << time_text(r.t0) << '\n';
        } catch (const ProtocolIncomplete& e) {
            f << w << ",,,,\n";
            log << "warning: " << e.what() << '\n';
        }
        f.flush();
    }
}

void run_sweep(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const auto thetas = cfg.sweep_theta_deg.empty() ? default_sweep_thetas() : cfg.sweep_theta_deg;
    const auto stars = cfg.resolved_omega_star();
    const std::size_t widest = *std::max_element(stars.begin(), stars.end());

    QuenchParams ed = cfg.model;
    ed.L = cfg.ed_sites;
    const ThermalSpectrum spectrum(ed, cfg.thermal_boundary);

    struct Point {
        double theta;
        double phi;
        PauliLabel op;
    };
    std::vector<Point> points;
    for (double th : thetas)
        for (double ph : cfg.sweep_phi_deg)
            for (PauliLabel op : cfg.sweep_operators) points.push_back({th, ph, op});

    struct Result {
        double beta = 0.0;
        bool beta_ok = false;
        std::vector<OweMaximum> maxima;
        std::string error;
    };
    std::vector<Result> results(points.size());
    std::mutex log_mutex;
    parallel_for(points.size(), cfg.jobs, [&](std::size_t i) {
        const Point& p = points[i];
        const BlochAngles angles = BlochAngles::from_degrees(p.theta, p.phi);
        Result& r = results[i];
        try {
            r.beta = solve_beta(angles, spectrum).beta;
            r.beta_ok = true;
        } catch (const Error& e) {
            r.error = e.what();
        }
        try {
            const auto samples = sample_trajectory(p.op, cfg.resolved_site(), angles, cfg.model, cfg.evolution,
                                                   widest, cfg.stride);
            const ContributionSeries series = contribution_series(samples);
            for (std::size_t star : stars) r.maxima.push_back(max_owe(owe(series, star), cfg.t_lo, cfg.resolved_t_hi()));
        } catch (const Error& e) {
            r.maxima.clear();
            r.error = e.what();
        }
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "sweep: point " << i + 1 << "/" << points.size() << (r.error.empty() ? "" : " failed: " + r.error)
            << '\n';
    });

    auto f = open_csv(cfg.out_dir / "sweep.csv", false);
    f << csv_provenance(cfg) << '\n' << "theta_deg,phi_deg,operator,omega_star,beta_J,max_owe,t_of_max\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const auto& r = results[i];
        for (std::size_t s = 0; s < stars.size(); ++s) {
            f << csv_number(p.theta) << ',' << csv_number(p.phi) << ',' << to_char(p.op) << ',' << stars[s] << ','
              << (r.beta_ok ? csv_number(r.beta) : std::string()) << ',';
            if (s < r.maxima.size()) f << csv_number(r.maxima[s].value) << ',' << time_text(r.maxima[s].time);
            else f << ',';
            f << '\n';
        }
    }
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
    int failures = 0;
    auto check = [&](const std::string& name, double err, double tol) {
        const bool ok = err <= tol;
        if (!ok) ++failures;
        log << (ok ? "PASS " : "FAIL ") << name << " err=" << csv_number(err) << " tol=" << csv_number(tol) << '\n';
    };

    QuenchParams p = cfg.model;
    p.L = 5;
    const double dt = 0.01;
    const std::size_t steps = 100;
    const BlochAngles angles = cfg.angles();
    const ParallelBasis basis = parallel_basis(angles);
    const std::size_t site = 3;

    OperatorMps state = local_operator_mps(cfg.op, site, p.L);
    advance(state, build_trotter_layer(p, dt), steps, Truncation{});
    const oracle::DenseOperatorVector start = oracle::local_operator(cfg.op, site, p.L);
    const oracle::DenseOperatorVector trotter = oracle::TrotterPropagator(p, dt).evolve(start, steps);
    const oracle::DenseOperatorVector exact = oracle::exact_heisenberg(start, p, double(steps) * dt);

    check("coefficients vs dense Trotter circuit", (oracle::from_mps(state).coefficients - trotter.coefficients).cwiseAbs().maxCoeff(), 1e-10);
    check("expectation vs exact evolution",
          std::abs(product_expectation(state, basis) - oracle::expectation(exact, angles)), 1e-5);

    const WeightDensities d = densities(state, basis, p.L);
    const WeightDensities dd = oracle::densities(trotter, basis, p.L);
    double derr = 0.0;
    for (std::size_t w = 0; w <= p.L; ++w) {
        derr = std::max({derr, std::abs(d.contributing[w] - dd.contributing[w]),
                         std::abs(d.noncontributing[w] - dd.noncontributing[w])});
    }
    check("densities vs enumeration", derr, 1e-10);

    const auto c = direct_contributions(state, basis, p.L);
    const auto dc = oracle::contributions(trotter, basis, p.L);
    double cerr = 0.0;
    for (std::size_t w = 0; w <= p.L; ++w) cerr = std::max(cerr, std::abs(c[w] - dc[w]));
    check("contributions vs enumeration", cerr, 1e-10);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(Eigen::Index(1) << (2 * p.L));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    const oracle::DenseOperatorVector dv{p.L, v, Frame::parallel, angles};
    double perr = 0.0;
    for (std::size_t w = 0; w <= p.L; ++w) {
        const Eigen::VectorXd got = oracle::apply_mpo(weight_projector(w, p.L).mpo, v);
        perr = std::max(perr, (got - oracle::exact_weight_sector(dv, oracle::SectorKind::total, w).coefficients)
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    check("weight projectors vs enumeration", perr, 1e-12);

    log << (failures == 0 ? "verify: all checks passed\n" : "verify: some checks failed\n");
    return failures;
}

}  // namespace opweight
