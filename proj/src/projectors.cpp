#include "opweight/projectors.hpp"

#include <array>
#include <vector>

#include "opweight/error.hpp"

namespace opweight {
namespace {

using SiteDiag = std::array<double, 4>;  // diagonal single-site projector in the basis frame

constexpr SiteDiag kZero{0, 0, 0, 0};
constexpr SiteDiag kIdentityOnly{1, 0, 0, 0};
constexpr SiteDiag kAll{1, 1, 1, 1};
constexpr SiteDiag kNonIdentity{0, 1, 1, 1};
constexpr SiteDiag kContributing{1, 1, 0, 0};
constexpr SiteDiag kParallelOnly{0, 1, 0, 0};
constexpr SiteDiag kOrthogonalOnly{0, 0, 1, 1};

// Builds an MPO from a bulk transfer matrix of diagonal blocks. The left
// boundary selects row 0 and the right boundary column `final_state`.
Mpo automaton_mpo(const std::vector<std::vector<SiteDiag>>& transfer, std::size_t final_state, std::size_t L) {
    const std::size_t dim = transfer.size();
    Mpo mpo;
    mpo.sites.reserve(L);
    for (std::size_t j = 0; j < L; ++j) {
        const bool first = j == 0;
        const bool last = j + 1 == L;
        MpoTensor w(first ? 1 : dim, last ? 1 : dim);
        for (std::size_t a = 0; a < w.left; ++a) {
            for (std::size_t b = 0; b < w.right; ++b) {
                const std::size_t from = first ? 0 : a;
                const std::size_t to = last ? final_state : b;
                for (std::size_t p = 0; p < 4; ++p) w(a, p, p, b) = transfer[from][to][p];
            }
        }
        mpo.sites.push_back(std::move(w));
    }
    return mpo;
}

std::vector<std::vector<SiteDiag>> counter_transfer(std::size_t omega, const SiteDiag& stay, const SiteDiag& count) {
    std::vector<std::vector<SiteDiag>> t(omega + 1, std::vector<SiteDiag>(omega + 1, kZero));
    for (std::size_t k = 0; k <= omega; ++k) {
        t[k][k] = stay;
        if (k + 1 <= omega) t[k][k + 1] = count;
    }
    return t;
}

void require_length(std::size_t L) {
    if (L < 1) throw invalid_input("projector: empty chain");
}

}  // namespace

ProjectorMpo contributing_projector(const ParallelBasis& basis, std::size_t L) {
    require_length(L);
    return {automaton_mpo({{kContributing}}, 0, L), ProjectorKind::contributing, 0, basis, false};
}

ProjectorMpo noncontributing_projector(const ParallelBasis& basis, std::size_t L) {
    require_length(L);
    const std::vector<std::vector<SiteDiag>> t{{kContributing, kOrthogonalOnly}, {kZero, kAll}};
    return {automaton_mpo(t, 1, L), ProjectorKind::noncontributing, 0, basis, false};
}

ProjectorMpo weight_projector(std::size_t omega, std::size_t L) {
    require_length(L);
    ProjectorMpo out{automaton_mpo(counter_transfer(omega, kIdentityOnly, kNonIdentity), omega, L),
                     ProjectorKind::weight, omega, std::nullopt, omega > L};
    return out;
}

ProjectorMpo sector_projector(ProjectorKind kind, std::size_t omega, const ParallelBasis& basis, std::size_t L) {
    require_length(L);
    SiteDiag stay;
    SiteDiag count;
    if (kind == ProjectorKind::parallel_weight) {
        stay = {1, 0, 1, 1};
        count = kParallelOnly;
    } else if (kind == ProjectorKind::orthogonal_weight) {
        stay = kContributing;
        count = kOrthogonalOnly;
    } else {
        throw invalid_input("sector_projector: kind must be parallel_weight or orthogonal_weight");
    }
    return {automaton_mpo(counter_transfer(omega, stay, count), omega, L), kind, omega, basis, omega > L};
}

ProjectorMpo backflow_projector(std::size_t omega_perp, const ParallelBasis& basis, std::size_t L) {
    if (omega_perp < 1) throw invalid_input("backflow_projector: omega_perp must be at least 1");
    const ProjectorMpo nc = noncontributing_projector(basis, L);
    const ProjectorMpo w = weight_projector(omega_perp, L);
    Mpo product = compress_mpo(mpo_product(nc.mpo, w.mpo), 1e-20);
    return {std::move(product), ProjectorKind::product, omega_perp, basis, omega_perp > L};
}

OperatorMps apply_projector(const ProjectorMpo& projector, const OperatorMps& state, const Truncation& trunc) {
    if (projector.basis) {
        if (state.frame != Frame::parallel) {
            throw invalid_input("apply_projector: rotate the state into the projector's basis frame first");
        }
        if (state.frame_angles && (state.frame_angles->theta != projector.basis->angles.theta ||
                                   state.frame_angles->phi != projector.basis->angles.phi)) {
            throw invalid_input("apply_projector: state and projector use different parallel bases");
        }
    }
    return apply_mpo(projector.mpo, state, trunc);
}

}  // namespace opweight
