#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "opweight/analysis.hpp"
#include "opweight/config.hpp"
#include "opweight/evolution.hpp"
#include "opweight/mps.hpp"

namespace opweight {

/// Everything recorded at one sampled time of an evolution.
struct TrajectorySample {
    std::size_t step = 0;
    double t = 0.0;
    double exact = 0.0;  // Tr(ρ O(t))
    WeightDensities densities;
    std::vector<double> contributions;
    double epsilon = 0.0;
    std::size_t max_bond = 0;
    double osee_center = 0.0;
};

TrajectorySample sample_state(const OperatorMps& state, std::size_t step, double dt, const ParallelBasis& basis,
                              std::size_t omega_max);

/// Advances `state` from `first_step` to `last_step` in chunks of `stride`
/// steps (the last chunk may be shorter) and calls `visit` after each chunk.
void run_steps(OperatorMps& state, const EvolutionLayer& layer, std::size_t first_step, std::size_t last_step,
               std::size_t stride, const Truncation& trunc,
               const std::function<void(const OperatorMps&, std::size_t)>& visit);

/// Evolves a local operator and samples it at t = 0 and every `stride` steps.
std::vector<TrajectorySample> sample_trajectory(PauliLabel op, std::size_t site, BlochAngles angles,
                                                const QuenchParams& params, const EvolutionConfig& config,
                                                std::size_t omega_max, std::size_t stride);

ContributionSeries contribution_series(const std::vector<TrajectorySample>& samples);

std::string csv_number(double x);
/// "# config_hash=... version=..." line written above every CSV header.
std::string csv_provenance(const RunConfig& cfg);

/// tempmap.csv over the configured grid. Returns the number of rows.
std::size_t run_tempmap(const RunConfig& cfg, std::ostream& log);

/// densities.csv, contributions.csv, owe.csv and observables.csv, with
/// periodic checkpoints. With `resume`, continues from the checkpoint in the
/// output directory and rewrites only the rows after it.
void run_evolve(const RunConfig& cfg, bool resume, std::ostream& log);

/// backflow.csv for every configured ω⊥.
void run_backflow(const RunConfig& cfg, std::ostream& log);

/// sweep.csv over sweep angles × φ cuts × operators.
void run_sweep(const RunConfig& cfg, std::ostream& log);

/// Small-scale oracle comparisons. Returns the number of failed checks.
int run_verify(const RunConfig& cfg, std::ostream& log);

}  // namespace opweight
