#include "opweight/analysis.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "opweight/projectors.hpp"

namespace opweight {
namespace {

bool same_angles(const BlochAngles& a, const BlochAngles& b) { return a.theta == b.theta && a.phi == b.phi; }

// Returns the state expressed in the basis frame, copying only when a
// rotation is needed.
const OperatorMps& in_basis_frame(const OperatorMps& state, const ParallelBasis& basis,
                                  std::optional<OperatorMps>& holder) {
    if (state.frame == Frame::parallel) {
        if (state.frame_angles && same_angles(*state.frame_angles, basis.angles)) return state;
        if (!state.frame_angles) throw invalid_input("state in parallel frame without recorded angles");
        const ParallelBasis own = parallel_basis(*state.frame_angles);
        holder = to_parallel_frame(to_pauli_frame(state, own), basis);
        return *holder;
    }
    holder = to_parallel_frame(state, basis);
    return *holder;
}

// Dual of the product state in its own frame: ⟨1⟩ = ⟨σ∥⟩ = 1, ⟨σ⊥⟩ = 0.
OperatorMps product_dual(const ParallelBasis& basis, std::size_t L) {
    OperatorMps dual;
    dual.frame = Frame::parallel;
    dual.frame_angles = basis.angles;
    dual.sites.assign(L, SiteTensor(1, 1));
    for (auto& s : dual.sites) {
        s(0, 0, 0) = 1.0;
        s(0, 1, 0) = 1.0;
    }
    return dual;
}

}  // namespace

WeightDensities densities(const OperatorMps& state, const ParallelBasis& basis, std::size_t omega_max) {
    if (omega_max > state.length()) throw invalid_input("densities: omega_max exceeds chain length");
    std::optional<OperatorMps> holder;
    const OperatorMps& s = in_basis_frame(state, basis, holder);

    // env[k][c]: weight count k, c = 1 once an orthogonal insertion was seen.
    using Slot = std::optional<RowMatrix>;
    std::vector<std::array<Slot, 2>> env(omega_max + 1);
    env[0][0] = RowMatrix::Ones(1, 1);

    for (const auto& site : s.sites) {
        const auto m = site.right_matrix();
        const Eigen::Index r = Eigen::Index(site.right);
        std::vector<std::array<Slot, 2>> next(omega_max + 1);
        auto add = [&](std::size_t k, int c, const RowMatrix& term) {
            if (k > omega_max) return;
            auto& slot = next[k][c];
            if (slot) {
                *slot += term;
            } else {
                slot = term;
            }
        };
        for (std::size_t k = 0; k <= omega_max; ++k) {
            for (int c = 0; c < 2; ++c) {
                if (!env[k][c]) continue;
                const RowMatrix em = *env[k][c] * m;
                add(k, c, m.middleCols(0, r).transpose() * em.middleCols(0, r));
                if (k == omega_max) continue;
                add(k + 1, c, m.middleCols(r, r).transpose() * em.middleCols(r, r));
                add(k + 1, 1,
                    m.middleCols(2 * r, r).transpose() * em.middleCols(2 * r, r) +
                        m.middleCols(3 * r, r).transpose() * em.middleCols(3 * r, r));
            }
        }
        env = std::move(next);
    }

    WeightDensities out;
    out.contributing.assign(omega_max + 1, 0.0);
    out.noncontributing.assign(omega_max + 1, 0.0);
    for (std::size_t k = 0; k <= omega_max; ++k) {
        if (env[k][0]) out.contributing[k] = (*env[k][0])(0, 0);
        if (env[k][1]) out.noncontributing[k] = (*env[k][1])(0, 0);
    }
    return out;
}

std::vector<double> direct_contributions(const OperatorMps& state, const ParallelBasis& basis,
                                         std::size_t omega_max) {
    if (omega_max > state.length()) throw invalid_input("direct_contributions: omega_max exceeds chain length");
    std::optional<OperatorMps> holder;
    const OperatorMps& s = in_basis_frame(state, basis, holder);

    std::vector<std::optional<RowMatrix>> v(omega_max + 1);
    v[0] = RowMatrix::Ones(1, 1);
    for (const auto& site : s.sites) {
        std::vector<std::optional<RowMatrix>> next(omega_max + 1);
        for (std::size_t k = 0; k <= omega_max; ++k) {
            if (!v[k]) continue;
            const RowMatrix stay = *v[k] * site.slice(0);
            next[k] = next[k] ? RowMatrix(*next[k] + stay) : stay;
            if (k == omega_max) continue;
            const RowMatrix up = *v[k] * site.slice(1);
            next[k + 1] = next[k + 1] ? RowMatrix(*next[k + 1] + up) : up;
        }
        v = std::move(next);
    }
    std::vector<double> out(omega_max + 1, 0.0);
    for (std::size_t k = 0; k <= omega_max; ++k) {
        if (v[k]) out[k] = (*v[k])(0, 0);
    }
    return out;
}

double product_expectation(const OperatorMps& state, const ParallelBasis& basis) {
    std::optional<OperatorMps> holder;
    const OperatorMps& s = in_basis_frame(state, basis, holder);
    return inner(product_dual(basis, s.length()), s);
}

OweSample owe_sample(const std::vector<double>& contributions, double exact, std::size_t omega_star) {
    if (omega_star < 1) throw invalid_input("owe: omega_star must be at least 1");
    if (contributions.size() <= omega_star) throw invalid_input("owe: contributions do not reach omega_star");
    OweSample out;
    out.deviations.resize(omega_star);
    out.probabilities.assign(omega_star, 0.0);
    double acc = contributions[0];
    for (std::size_t w = 1; w <= omega_star; ++w) {
        acc += contributions[w];
        out.deviations[w - 1] = std::abs(exact - acc);
        out.normalisation += out.deviations[w - 1];
    }
    if (!(out.normalisation >= kConvergedDeviation)) {
        out.converged = true;
        return out;
    }
    for (std::size_t i = 0; i < omega_star; ++i) {
        const double p = out.deviations[i] / out.normalisation;
        out.probabilities[i] = p;
        if (p > 0.0) out.owe -= p * std::log2(p);
    }
    return out;
}

OweSeries owe(const ContributionSeries& series, std::size_t omega_star) {
    if (series.exact.size() != series.times.size() || series.contributions.size() != series.times.size()) {
        throw invalid_input("owe: series channels have different lengths");
    }
    OweSeries out;
    out.omega_star = omega_star;
    out.times = series.times;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        OweSample s = owe_sample(series.contributions[i], series.exact[i], omega_star);
        out.owe.push_back(s.owe);
        out.probabilities.push_back(std::move(s.probabilities));
        out.converged.push_back(s.converged);
    }
    return out;
}

OweMaximum max_owe(const OweSeries& series, double t_lo, double t_hi) {
    OweMaximum best;
    bool found = false;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_lo || t > t_hi) continue;
        if (!found || series.owe[i] > best.value) {
            best = {series.owe[i], t};
            found = true;
        }
    }
    if (!found) throw invalid_input("max_owe: no samples inside the window");
    return best;
}

std::size_t first_peak(const std::vector<double>& values, double rise_tolerance) {
    for (std::size_t k = 1; k + 1 < values.size(); ++k) {
        if (values[k] - values[k - 1] > rise_tolerance && values[k + 1] - values[k] <= 0.0) return k;
    }
    return 0;
}

double parabolic_offset(double left, double mid, double right) {
    const double curvature = left - 2.0 * mid + right;
    if (curvature == 0.0) return 0.0;
    return 0.5 * (left - right) / curvature;
}

BackflowRecord backflow(PauliLabel op, std::size_t site, const ParallelBasis& basis, std::size_t omega_perp,
                        const QuenchParams& params, const EvolutionConfig& config, std::size_t stride) {
    if (omega_perp < 1) throw invalid_input("backflow: omega_perp must be at least 1");
    if (omega_perp > params.L) throw invalid_input("backflow: omega_perp exceeds chain length");
    if (!(config.dt > 0.0)) throw invalid_input("backflow: dt must be positive");
    if (stride < 1) stride = 1;
    constexpr double kRiseTolerance = 1e-14;

    const std::size_t L = params.L;
    const auto total_steps = static_cast<std::size_t>(std::llround(config.t_max / config.dt));
    const EvolutionLayer layer = build_trotter_layer(params, config.dt);

    BackflowRecord rec;
    rec.omega_perp = omega_perp;
    OperatorMps state = local_operator_mps(op, site, L);
    OperatorMps previous = state;
    rec.monitor_times.push_back(0.0);
    rec.monitor_density.push_back(densities(state, basis, omega_perp).noncontributing[omega_perp]);

    std::size_t peak = 0;
    for (std::size_t k = 1; k <= total_steps; ++k) {
        previous = state;
        advance(state, layer, 1, config.trunc);
        rec.monitor_times.push_back(double(k) * config.dt);
        rec.monitor_density.push_back(densities(state, basis, omega_perp).noncontributing[omega_perp]);
        const auto& m = rec.monitor_density;
        if (k >= 2 && m[k - 1] - m[k - 2] > kRiseTolerance && m[k] - m[k - 1] <= 0.0) {
            peak = k - 1;
            break;
        }
    }
    if (peak == 0) {
        throw ProtocolIncomplete("backflow: density at omega_perp=" + std::to_string(omega_perp) +
                                     " has no peak before t_max",
                                 rec.monitor_times, rec.monitor_density);
    }

    const auto& m = rec.monitor_density;
    rec.t0 = double(peak) * config.dt;
    const double offset = parabolic_offset(m[peak - 1], m[peak], m[peak + 1]);
    rec.t0_refined = rec.t0 + offset * config.dt;
    rec.peak_density = m[peak];

    const OperatorMps at_peak = to_parallel_frame(previous, basis);
    const ProjectorMpo projector = backflow_projector(omega_perp, basis, L);
    OperatorMps projected = to_pauli_frame(apply_projector(projector, at_peak, config.trunc), basis);
    projected.ledger = {};
    projected.time = rec.t0;

    // The overlap at t0 is taken through the uncompressed projector, whose
    // 0/1 structure makes it vanish exactly.
    const Mpo exact_projector = mpo_product(noncontributing_projector(basis, L).mpo, weight_projector(omega_perp, L).mpo);
    const OperatorMps dual = product_dual(basis, L);
    rec.times.push_back(rec.t0);
    rec.overlaps.push_back(std::abs(sandwich(dual, exact_projector, at_peak)));
    rec.osee.push_back(osee(projected, L / 2));

    std::size_t k = peak;
    while (k < total_steps) {
        const std::size_t chunk = std::min(stride, total_steps - k);
        advance(projected, layer, chunk, config.trunc);
        k += chunk;
        rec.times.push_back(double(k) * config.dt);
        rec.overlaps.push_back(std::abs(product_expectation(projected, basis)));
        rec.osee.push_back(osee(projected, L / 2));
    }
    return rec;
}

}  // namespace opweight
