#include "opweight/mps.hpp"

#include <cmath>
#include <string>

#include "opweight/error.hpp"

namespace opweight {
namespace {

SiteTensor site_from_left_matrix(const RowMatrix& m) {
    SiteTensor t(static_cast<std::size_t>(m.rows()) / 4, static_cast<std::size_t>(m.cols()));
    t.left_matrix() = m;
    return t;
}

SiteTensor site_from_right_matrix(const RowMatrix& m) {
    SiteTensor t(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()) / 4);
    t.right_matrix() = m;
    return t;
}

struct Split {
    RowMatrix left;
    Eigen::VectorXd s;
    RowMatrix right;
    double discarded = 0.0;
};

// Truncated SVD of m. Exactly-zero rows and columns are removed before the
// factorisation and re-embedded as exact zeros, which keeps untouched
// identity sites bit-exact.
Split split_matrix(const RowMatrix& m, const Truncation& trunc) {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    cols.reserve(static_cast<std::size_t>(m.cols()));
    std::vector<bool> col_used(static_cast<std::size_t>(m.cols()), false);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        bool any = false;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (m(r, c) != 0.0) {
                any = true;
                col_used[static_cast<std::size_t>(c)] = true;
            }
        }
        if (any) rows.push_back(r);
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (col_used[static_cast<std::size_t>(c)]) cols.push_back(c);
    }

    Split out;
    if (rows.empty()) {
        out.left = RowMatrix::Zero(m.rows(), 1);
        out.left(0, 0) = 1.0;
        out.s = Eigen::VectorXd::Zero(1);
        out.right = RowMatrix::Zero(1, m.cols());
        out.right(0, 0) = 1.0;
        return out;
    }

    const bool dense = rows.size() == static_cast<std::size_t>(m.rows()) &&
                       cols.size() == static_cast<std::size_t>(m.cols());
    RealMatrix reduced;
    if (dense) {
        reduced = m;
    } else {
        reduced.resize(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) reduced(Eigen::Index(i), Eigen::Index(j)) = m(rows[i], cols[j]);
    }

    const double cutoff = std::max(trunc.lambda2_cutoff, kNumericalZero);
    auto svd = linalg::svd_truncated(reduced, trunc.chi_max, cutoff);
    const Eigen::Index k = svd.singular_values.size();
    if (trunc.hard_cap > 0 && static_cast<std::size_t>(k) > trunc.hard_cap) {
        throw resource_limit("bond dimension " + std::to_string(k) + " exceeds hard cap " +
                             std::to_string(trunc.hard_cap));
    }
    out.s = svd.singular_values;
    out.discarded = svd.discarded_weight;
    if (dense) {
        out.left = svd.left;
        out.right = svd.right;
    } else {
        out.left = RowMatrix::Zero(m.rows(), k);
        out.right = RowMatrix::Zero(k, m.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) out.left.row(rows[i]) = svd.left.row(Eigen::Index(i));
        for (std::size_t j = 0; j < cols.size(); ++j) out.right.col(cols[j]) = svd.right.col(Eigen::Index(j));
    }
    return out;
}

void shift_center_right(OperatorMps& state, std::size_t j) {
    const RealMatrix m = state.sites[j].left_matrix();
    Eigen::HouseholderQR<RealMatrix> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    const RealMatrix q = qr.householderQ() * RealMatrix::Identity(m.rows(), k);
    const RealMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    state.sites[j] = site_from_left_matrix(q);
    const RowMatrix next = r * state.sites[j + 1].right_matrix();
    state.sites[j + 1] = site_from_right_matrix(next);
}

void shift_center_left(OperatorMps& state, std::size_t j) {
    const RealMatrix mt = state.sites[j].right_matrix().transpose();
    Eigen::HouseholderQR<RealMatrix> qr(mt);
    const Eigen::Index k = std::min(mt.rows(), mt.cols());
    const RealMatrix q = qr.householderQ() * RealMatrix::Identity(mt.rows(), k);
    const RealMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    state.sites[j] = site_from_right_matrix(q.transpose());
    const RowMatrix prev = state.sites[j - 1].left_matrix() * r.transpose();
    state.sites[j - 1] = site_from_left_matrix(prev);
}

double entropy_of(const Eigen::VectorXd& s) {
    const double total = s.squaredNorm();
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double p = s(k) * s(k) / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

void require_compatible(const OperatorMps& a, const OperatorMps& b, const char* where) {
    if (a.length() != b.length()) throw invalid_input(std::string(where) + ": length mismatch");
    if (a.frame != b.frame) throw invalid_input(std::string(where) + ": frame mismatch");
    if (a.frame == Frame::parallel && a.frame_angles && b.frame_angles &&
        (a.frame_angles->theta != b.frame_angles->theta || a.frame_angles->phi != b.frame_angles->phi)) {
        throw invalid_input(std::string(where) + ": states are expressed in different parallel bases");
    }
}

}  // namespace

std::size_t OperatorMps::max_bond() const {
    std::size_t m = 1;
    for (const auto& s : sites) m = std::max(m, s.right);
    return m;
}

std::vector<std::size_t> OperatorMps::bond_dimensions() const {
    std::vector<std::size_t> dims;
    for (std::size_t j = 0; j + 1 < sites.size(); ++j) dims.push_back(sites[j].right);
    return dims;
}

void OperatorMps::validate() const {
    if (sites.empty()) throw invalid_input("OperatorMps: empty chain");
    if (sites.front().left != 1 || sites.back().right != 1) throw invalid_input("OperatorMps: boundary bonds must be 1");
    for (std::size_t j = 0; j < sites.size(); ++j) {
        const auto& s = sites[j];
        if (s.data.size() != s.left * 4 * s.right) throw invalid_input("OperatorMps: tensor size mismatch");
        if (j + 1 < sites.size() && s.right != sites[j + 1].left)
            throw invalid_input("OperatorMps: bond mismatch at " + std::to_string(j));
        for (double v : s.data)
            if (!std::isfinite(v)) throw invalid_input("OperatorMps: non-finite amplitude");
    }
    if (frame == Frame::parallel && !frame_angles) throw invalid_input("OperatorMps: parallel frame without angles");
}

std::size_t Mpo::max_bond() const {
    std::size_t m = 1;
    for (const auto& s : sites) m = std::max(m, s.right);
    return m;
}

std::vector<std::size_t> Mpo::bond_dimensions() const {
    std::vector<std::size_t> dims;
    for (std::size_t j = 0; j + 1 < sites.size(); ++j) dims.push_back(sites[j].right);
    return dims;
}

OperatorMps local_operator_mps(PauliLabel op, std::size_t site, std::size_t L) {
    if (L < 1 || site < 1 || site > L) {
        throw invalid_input("local_operator_mps: site " + std::to_string(site) + " outside 1.." + std::to_string(L));
    }
    OperatorMps out;
    out.sites.assign(L, SiteTensor(1, 1));
    for (std::size_t j = 0; j < L; ++j) out.sites[j](0, 0, 0) = 1.0;
    out.sites[site - 1](0, 0, 0) = 0.0;
    out.sites[site - 1](0, static_cast<std::size_t>(op), 0) = 1.0;
    out.center = 0;
    return out;
}

OperatorMps product_state_mps(BlochAngles angles, std::size_t L) {
    if (L < 1) throw invalid_input("product_state_mps: empty chain");
    const ParallelBasis basis = parallel_basis(angles);
    OperatorMps out;
    out.sites.assign(L, SiteTensor(1, 1));
    for (auto& s : out.sites) {
        s(0, 0, 0) = 0.5;
        for (std::size_t k = 0; k < 3; ++k) s(0, k + 1, 0) = 0.5 * basis.parallel[k];
    }
    return out;
}

double inner(const OperatorMps& a, const OperatorMps& b) {
    require_compatible(a, b, "inner");
    RowMatrix env = RowMatrix::Ones(1, 1);
    for (std::size_t j = 0; j < a.length(); ++j) {
        RowMatrix next = RowMatrix::Zero(Eigen::Index(a.sites[j].right), Eigen::Index(b.sites[j].right));
        for (std::size_t p = 0; p < 4; ++p) {
            next.noalias() += a.sites[j].slice(p).transpose() * (env * b.sites[j].slice(p));
        }
        env = std::move(next);
    }
    return env(0, 0);
}

double expectation(const OperatorMps& rho, const OperatorMps& op) {
    return std::ldexp(inner(rho, op), static_cast<int>(rho.length()));
}

double sandwich(const OperatorMps& bra, const Mpo& mpo, const OperatorMps& ket) {
    require_compatible(bra, ket, "sandwich");
    if (mpo.length() != bra.length()) throw invalid_input("sandwich: MPO length mismatch");
    std::vector<RowMatrix> env{RowMatrix::Ones(1, 1)};
    for (std::size_t j = 0; j < bra.length(); ++j) {
        const auto& w = mpo.sites[j];
        const auto& a = bra.sites[j];
        const auto& b = ket.sites[j];
        std::vector<RowMatrix> next(w.right, RowMatrix::Zero(Eigen::Index(a.right), Eigen::Index(b.right)));
        for (std::size_t wl = 0; wl < w.left; ++wl) {
            for (std::size_t i = 0; i < 4; ++i) {
                const RowMatrix eb = env[wl] * b.slice(i);
                for (std::size_t o = 0; o < 4; ++o) {
                    RowMatrix contracted;
                    bool computed = false;
                    for (std::size_t wr = 0; wr < w.right; ++wr) {
                        const double coeff = w(wl, o, i, wr);
                        if (coeff == 0.0) continue;
                        if (!computed) {
                            contracted = a.slice(o).transpose() * eb;
                            computed = true;
                        }
                        next[wr] += coeff * contracted;
                    }
                }
            }
        }
        env = std::move(next);
    }
    return env[0](0, 0);
}

OperatorMps apply_mpo(const Mpo& mpo, const OperatorMps& state, const Truncation& trunc) {
    if (mpo.length() != state.length()) throw invalid_input("apply_mpo: MPO length mismatch");
    OperatorMps out;
    out.frame = state.frame;
    out.frame_angles = state.frame_angles;
    out.ledger = state.ledger;
    out.time = state.time;
    out.sites.reserve(state.length());
    for (std::size_t j = 0; j < state.length(); ++j) {
        const auto& w = mpo.sites[j];
        const auto& a = state.sites[j];
        SiteTensor t(w.left * a.left, w.right * a.right);
        for (std::size_t wl = 0; wl < w.left; ++wl)
            for (std::size_t o = 0; o < 4; ++o)
                for (std::size_t i = 0; i < 4; ++i)
                    for (std::size_t wr = 0; wr < w.right; ++wr) {
                        const double coeff = w(wl, o, i, wr);
                        if (coeff == 0.0) continue;
                        for (std::size_t al = 0; al < a.left; ++al)
                            for (std::size_t ar = 0; ar < a.right; ++ar)
                                t(wl * a.left + al, o, wr * a.right + ar) += coeff * a(al, i, ar);
                    }
        out.sites.push_back(std::move(t));
    }
    compress(out, trunc);
    return out;
}

void move_center(OperatorMps& state, std::size_t site) {
    const std::size_t L = state.length();
    if (site >= L) throw invalid_input("move_center: site out of range");
    if (!state.center) {
        for (std::size_t j = 0; j < site; ++j) shift_center_right(state, j);
        for (std::size_t j = L - 1; j > site; --j) shift_center_left(state, j);
        state.center = site;
        return;
    }
    while (*state.center < site) {
        shift_center_right(state, *state.center);
        ++*state.center;
    }
    while (*state.center > site) {
        shift_center_left(state, *state.center);
        --*state.center;
    }
}

void compress(OperatorMps& state, const Truncation& trunc) {
    const std::size_t L = state.length();
    move_center(state, L - 1);
    for (std::size_t j = L - 1; j > 0; --j) {
        const RowMatrix m = state.sites[j].right_matrix();
        Split split = split_matrix(m, trunc);
        state.sites[j] = site_from_right_matrix(split.right);
        const RowMatrix us = split.left * split.s.asDiagonal();
        const RowMatrix prev = state.sites[j - 1].left_matrix() * us;
        state.sites[j - 1] = site_from_left_matrix(prev);
        state.ledger.record(state.time, j - 1, split.discarded);
    }
    state.center = 0;
}

void apply_two_site_gate(OperatorMps& state, std::size_t bond, const FoldedGate& gate, SweepDirection dir,
                         const Truncation& trunc) {
    if (bond + 1 >= state.length()) throw invalid_input("apply_two_site_gate: bond out of range");
    move_center(state, dir == SweepDirection::left_to_right ? bond : bond + 1);

    const SiteTensor& a = state.sites[bond];
    const SiteTensor& b = state.sites[bond + 1];
    const std::size_t dl = a.left;
    const std::size_t dr = b.right;
    RowMatrix theta = a.left_matrix() * b.right_matrix();  // (dl·4) × (4·dr)
    RowMatrix block_out(16, Eigen::Index(dr));
    for (std::size_t l = 0; l < dl; ++l) {
        Eigen::Map<RowMatrix> block(theta.data() + l * 16 * dr, 16, Eigen::Index(dr));
        block_out.noalias() = gate * block;
        block = block_out;
    }

    Split split = split_matrix(theta, trunc);
    if (dir == SweepDirection::left_to_right) {
        state.sites[bond] = site_from_left_matrix(split.left);
        state.sites[bond + 1] = site_from_right_matrix(split.s.asDiagonal() * split.right);
        state.center = bond + 1;
    } else {
        state.sites[bond] = site_from_left_matrix(split.left * split.s.asDiagonal());
        state.sites[bond + 1] = site_from_right_matrix(split.right);
        state.center = bond;
    }
    state.ledger.record(state.time, bond, split.discarded);
}

Eigen::VectorXd schmidt_values(const OperatorMps& state, std::size_t cut) {
    if (cut < 1 || cut >= state.length()) throw invalid_input("schmidt_values: cut out of range");
    OperatorMps work = state;
    move_center(work, cut - 1);
    const RealMatrix m = work.sites[cut - 1].left_matrix();
    return linalg::svd_truncated(m, 0, 0.0).singular_values;
}

double osee(const OperatorMps& state, std::size_t cut) {
    if (cut < 1 || cut >= state.length()) throw invalid_input("osee: cut out of range");
    return entropy_of(schmidt_values(state, cut));
}

std::vector<double> osee_profile(const OperatorMps& state) {
    const std::size_t L = state.length();
    std::vector<double> out;
    if (L < 2) return out;
    OperatorMps work = state;
    move_center(work, 0);
    for (std::size_t j = 0; j + 1 < L; ++j) {
        const RealMatrix m = work.sites[j].left_matrix();
        auto svd = linalg::svd_truncated(m, 0, 0.0);
        out.push_back(entropy_of(svd.singular_values));
        work.sites[j] = site_from_left_matrix(svd.left);
        const RowMatrix next = (svd.singular_values.asDiagonal() * svd.right) * work.sites[j + 1].right_matrix();
        work.sites[j + 1] = site_from_right_matrix(next);
    }
    return out;
}

OperatorMps rotate_sites(const OperatorMps& state, const Eigen::Matrix4d& rotation, Frame target,
                         std::optional<BlochAngles> target_angles) {
    OperatorMps out = state;
    out.frame = target;
    out.frame_angles = target_angles;
    const bool orthogonal = (rotation * rotation.transpose() - Eigen::Matrix4d::Identity()).norm() < 1e-12;
    if (!orthogonal) out.center.reset();
    for (auto& s : out.sites) {
        for (std::size_t l = 0; l < s.left; ++l) {
            Eigen::Map<RowMatrix> block(s.data.data() + l * 4 * s.right, 4, Eigen::Index(s.right));
            const RowMatrix rotated = rotation * block;
            block = rotated;
        }
    }
    return out;
}

OperatorMps to_parallel_frame(const OperatorMps& state, const ParallelBasis& basis) {
    if (state.frame != Frame::pauli) throw invalid_input("to_parallel_frame: state is not in the Pauli frame");
    return rotate_sites(state, frame_rotation(basis), Frame::parallel, basis.angles);
}

OperatorMps to_pauli_frame(const OperatorMps& state, const ParallelBasis& basis) {
    if (state.frame != Frame::parallel) throw invalid_input("to_pauli_frame: state is not in a parallel frame");
    return rotate_sites(state, frame_rotation(basis).transpose(), Frame::pauli, std::nullopt);
}

Mpo identity_mpo(std::size_t L) {
    Mpo out;
    out.sites.assign(L, MpoTensor(1, 1));
    for (auto& w : out.sites)
        for (std::size_t p = 0; p < 4; ++p) w(0, p, p, 0) = 1.0;
    return out;
}

Mpo mpo_product(const Mpo& a, const Mpo& b) {
    if (a.length() != b.length()) throw invalid_input("mpo_product: length mismatch");
    Mpo out;
    for (std::size_t j = 0; j < a.length(); ++j) {
        const auto& wa = a.sites[j];
        const auto& wb = b.sites[j];
        MpoTensor t(wa.left * wb.left, wa.right * wb.right);
        for (std::size_t la = 0; la < wa.left; ++la)
            for (std::size_t ra = 0; ra < wa.right; ++ra)
                for (std::size_t o = 0; o < 4; ++o)
                    for (std::size_t k = 0; k < 4; ++k) {
                        const double ca = wa(la, o, k, ra);
                        if (ca == 0.0) continue;
                        for (std::size_t lb = 0; lb < wb.left; ++lb)
                            for (std::size_t rb = 0; rb < wb.right; ++rb)
                                for (std::size_t i = 0; i < 4; ++i)
                                    t(la * wb.left + lb, o, i, ra * wb.right + rb) += ca * wb(lb, k, i, rb);
                    }
        out.sites.push_back(std::move(t));
    }
    return out;
}

Mpo compress_mpo(const Mpo& mpo, double lambda2_cutoff) {
    Mpo out = mpo;
    const std::size_t L = out.length();
    auto as_left = [](const MpoTensor& w) {
        return RowMatrix(Eigen::Map<const RowMatrix>(w.data.data(), Eigen::Index(w.left * 16), Eigen::Index(w.right)));
    };
    auto as_right = [](const MpoTensor& w) {
        return RowMatrix(Eigen::Map<const RowMatrix>(w.data.data(), Eigen::Index(w.left), Eigen::Index(16 * w.right)));
    };
    auto from_rows = [](const RowMatrix& m, std::size_t left, std::size_t right) {
        MpoTensor w(left, right);
        Eigen::Map<RowMatrix>(w.data.data(), m.rows(), m.cols()) = m;
        return w;
    };
    for (std::size_t j = 0; j + 1 < L; ++j) {
        const RealMatrix m = as_left(out.sites[j]);
        Eigen::HouseholderQR<RealMatrix> qr(m);
        const Eigen::Index k = std::min(m.rows(), m.cols());
        const RealMatrix q = qr.householderQ() * RealMatrix::Identity(m.rows(), k);
        const RealMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        out.sites[j] = from_rows(q, out.sites[j].left, std::size_t(k));
        const RowMatrix next = r * as_right(out.sites[j + 1]);
        out.sites[j + 1] = from_rows(next, std::size_t(k), out.sites[j + 1].right);
    }
    for (std::size_t j = L - 1; j > 0; --j) {
        const RealMatrix m = as_right(out.sites[j]);
        auto svd = linalg::svd_truncated(m, 0, lambda2_cutoff);
        const Eigen::Index k = svd.singular_values.size();
        out.sites[j] = from_rows(svd.right, std::size_t(k), out.sites[j].right);
        const RowMatrix prev = as_left(out.sites[j - 1]) * (svd.left * svd.singular_values.asDiagonal());
        out.sites[j - 1] = from_rows(prev, out.sites[j - 1].left, std::size_t(k));
    }
    return out;
}

}  // namespace opweight
