#include "opweight/oracle.hpp"

#include <cmath>
#include <string>

#include "opweight/error.hpp"

namespace opweight::oracle {
namespace {

std::size_t pow4(std::size_t n) { return std::size_t(1) << (2 * n); }

void require_size(std::size_t L, const char* where) {
    if (L < 1) throw invalid_input(std::string(where) + ": empty chain");
    if (L > kMaxSites) throw resource_limit(std::string(where) + ": dense oracle limited to 7 sites");
}

// Applies a 4×4 map to one base-4 digit of every index.
template <typename Vec, typename Mat>
void transform_digit(Vec& v, const Mat& m, std::size_t site, std::size_t L) {
    const std::size_t stride = pow4(L - 1 - site);
    const std::size_t blocks = pow4(site);
    using Scalar = typename Vec::Scalar;
    Eigen::Matrix<Scalar, 4, 1> x;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t base = b * 4 * stride;
        for (std::size_t i = 0; i < stride; ++i) {
            for (std::size_t d = 0; d < 4; ++d) x(Eigen::Index(d)) = v(Eigen::Index(base + d * stride + i));
            const Eigen::Matrix<Scalar, 4, 1> y = m * x;
            for (std::size_t d = 0; d < 4; ++d) v(Eigen::Index(base + d * stride + i)) = y(Eigen::Index(d));
        }
    }
}

std::size_t digit(std::size_t index, std::size_t site, std::size_t L) {
    return (index >> (2 * (L - 1 - site))) & 3u;
}

struct Counts {
    std::size_t total = 0;
    std::size_t parallel = 0;
    std::size_t orthogonal = 0;
};

// Label counts of a string index read in the basis frame.
Counts count_labels(std::size_t index, std::size_t L) {
    Counts c;
    for (std::size_t j = 0; j < L; ++j) {
        const std::size_t a = digit(index, j, L);
        if (a == 0) continue;
        ++c.total;
        if (a == 1) {
            ++c.parallel;
        } else {
            ++c.orthogonal;
        }
    }
    return c;
}

Eigen::Matrix2cd single(int a) {
    Eigen::Matrix2cd m;
    switch (a) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

// Embeds a product of single-site Paulis: labels[j] at site j.
DenseMatrix embed(const std::vector<int>& labels) {
    DenseMatrix out = DenseMatrix::Ones(1, 1);
    for (int a : labels) {
        const Eigen::Matrix2cd s = single(a);
        DenseMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * s;
        out = std::move(next);
    }
    return out;
}

DenseMatrix site_term(std::size_t L, std::size_t site, int a) {
    std::vector<int> labels(L, 0);
    labels[site] = a;
    return embed(labels);
}

DenseMatrix bond_term(std::size_t L, std::size_t site) {
    std::vector<int> labels(L, 0);
    labels[site] = 3;
    labels[site + 1] = 3;
    return embed(labels);
}

DenseOperatorVector require_pauli(const DenseOperatorVector& op, const char* where) {
    if (op.frame != Frame::pauli) throw invalid_input(std::string(where) + ": expected Pauli-frame coefficients");
    return op;
}

DenseOperatorVector in_basis(const DenseOperatorVector& op, const ParallelBasis& basis) {
    if (op.frame == Frame::parallel) {
        if (op.angles && op.angles->theta == basis.angles.theta && op.angles->phi == basis.angles.phi) return op;
        return to_parallel(to_pauli(op, parallel_basis(*op.angles)), basis);
    }
    return to_parallel(op, basis);
}

double own_owe(const std::vector<double>& contributions, double exact, std::size_t omega_star,
               std::vector<double>& p) {
    std::vector<double> d;
    double acc = 0.0;
    double n = 0.0;
    for (std::size_t w = 0; w <= omega_star; ++w) {
        acc += contributions[w];
        if (w == 0) continue;
        d.push_back(std::abs(exact - acc));
        n += d.back();
    }
    p.assign(omega_star, 0.0);
    if (n < kConvergedDeviation) return 0.0;
    double h = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        p[i] = d[i] / n;
        if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
    }
    return h;
}

DenseOperatorVector rotate_all(const DenseOperatorVector& op, const Eigen::Matrix4d& r) {
    DenseOperatorVector out = op;
    for (std::size_t j = 0; j < op.L; ++j) transform_digit(out.coefficients, r, j, op.L);
    return out;
}

}  // namespace

DenseOperatorVector local_operator(PauliLabel op, std::size_t site, std::size_t L) {
    require_size(L, "local_operator");
    if (site < 1 || site > L) throw invalid_input("local_operator: site out of range");
    DenseOperatorVector out{L, Eigen::VectorXd::Zero(Eigen::Index(pow4(L))), Frame::pauli, std::nullopt};
    out.coefficients(Eigen::Index(std::size_t(op) << (2 * (L - site)))) = 1.0;
    return out;
}

DenseOperatorVector product_state(BlochAngles angles, std::size_t L) {
    require_size(L, "product_state");
    const double n[4] = {1.0, std::sin(angles.theta) * std::cos(angles.phi),
                         std::sin(angles.theta) * std::sin(angles.phi), std::cos(angles.theta)};
    DenseOperatorVector out{L, Eigen::VectorXd(Eigen::Index(pow4(L))), Frame::pauli, std::nullopt};
    for (std::size_t s = 0; s < pow4(L); ++s) {
        double v = 1.0;
        for (std::size_t j = 0; j < L; ++j) v *= 0.5 * n[digit(s, j, L)];
        out.coefficients(Eigen::Index(s)) = v;
    }
    return out;
}

DenseOperatorVector from_mps(const OperatorMps& state) {
    const std::size_t L = state.length();
    require_size(L, "from_mps");
    RowMatrix cur = RowMatrix::Ones(1, 1);
    for (const auto& site : state.sites) {
        RowMatrix next(cur.rows() * 4, Eigen::Index(site.right));
        for (Eigen::Index r = 0; r < cur.rows(); ++r) {
            for (std::size_t p = 0; p < 4; ++p) next.row(r * 4 + Eigen::Index(p)) = cur.row(r) * site.slice(p);
        }
        cur = std::move(next);
    }
    return {L, cur.col(0), state.frame, state.frame_angles};
}

DenseMatrix to_matrix(const DenseOperatorVector& op) {
    require_pauli(op, "to_matrix");
    const std::size_t L = op.L;
    // Per-site map from Pauli label a to the interleaved digit 2i + j of (σ_a)_{ij}.
    Eigen::Matrix4cd g;
    for (int a = 0; a < 4; ++a) {
        const Eigen::Matrix2cd s = single(a);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(2 * i + j, a) = s(i, j);
    }
    Eigen::VectorXcd t = op.coefficients.cast<Complex>();
    for (std::size_t j = 0; j < L; ++j) transform_digit(t, g, j, L);
    const std::size_t dim = std::size_t(1) << L;
    DenseMatrix m{Eigen::Index(dim), Eigen::Index(dim)};
    for (std::size_t idx = 0; idx < pow4(L); ++idx) {
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t j = 0; j < L; ++j) {
            const std::size_t d = digit(idx, j, L);
            row = (row << 1) | (d >> 1);
            col = (col << 1) | (d & 1u);
        }
        m(Eigen::Index(row), Eigen::Index(col)) = t(Eigen::Index(idx));
    }
    return m;
}

DenseOperatorVector from_matrix(const DenseMatrix& m, std::size_t L) {
    require_size(L, "from_matrix");
    const std::size_t dim = std::size_t(1) << L;
    if (std::size_t(m.rows()) != dim || std::size_t(m.cols()) != dim) throw invalid_input("from_matrix: wrong size");
    Eigen::VectorXcd t(Eigen::Index(pow4(L)));
    for (std::size_t idx = 0; idx < pow4(L); ++idx) {
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t j = 0; j < L; ++j) {
            const std::size_t d = digit(idx, j, L);
            row = (row << 1) | (d >> 1);
            col = (col << 1) | (d & 1u);
        }
        t(Eigen::Index(idx)) = m(Eigen::Index(row), Eigen::Index(col));
    }
    // c_a = ½ Σ_ij (σ_a)_{ji} X_ij
    Eigen::Matrix4cd f;
    for (int a = 0; a < 4; ++a) {
        const Eigen::Matrix2cd s = single(a);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) f(a, 2 * i + j) = 0.5 * s(j, i);
    }
    for (std::size_t j = 0; j < L; ++j) transform_digit(t, f, j, L);
    return {L, t.real(), Frame::pauli, std::nullopt};
}

DenseMatrix hamiltonian(const QuenchParams& p) {
    if (p.L < 1) throw invalid_input("hamiltonian: empty chain");
    if (p.L > kMaxHamiltonianSites) throw resource_limit("hamiltonian: dense oracle limited to 12 sites");
    const std::size_t L = p.L;
    const Eigen::Index dim = Eigen::Index(1) << L;
    DenseMatrix h = DenseMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j + 1 < L; ++j) h -= p.J * bond_term(L, j);
    for (std::size_t j = 0; j < L; ++j) h -= p.g * site_term(L, j, 1) + p.h * site_term(L, j, 3);
    return h;
}

ExactPropagator::ExactPropagator(const QuenchParams& p) : params_(p) {
    auto eig = linalg::eigh(hamiltonian(p));
    energies_ = eig.eigenvalues;
    vectors_ = eig.eigenvectors;
}

DenseOperatorVector ExactPropagator::evolve(const DenseOperatorVector& op, double t) const {
    require_pauli(op, "exact_heisenberg");
    if (op.L != params_.L) throw invalid_input("exact_heisenberg: length mismatch");
    const Eigen::VectorXcd phase = (Complex(0.0, -t) * energies_.cast<Complex>()).array().exp();
    const DenseMatrix u = vectors_ * phase.asDiagonal() * vectors_.adjoint();
    return from_matrix(u.adjoint() * to_matrix(op) * u, op.L);
}

DenseOperatorVector exact_heisenberg(const DenseOperatorVector& op, const QuenchParams& p, double t) {
    return ExactPropagator(p).evolve(op, t);
}

TrotterPropagator::TrotterPropagator(const QuenchParams& p, double dt) : L_(p.L) {
    require_size(p.L, "trotter");
    if (p.L < 2) throw invalid_input("trotter: need at least two sites");
    const std::size_t L = p.L;
    const Eigen::Index dim = Eigen::Index(1) << L;
    std::vector<int> bonds_at(L, 0);
    for (std::size_t b = 0; b + 1 < L; ++b) {
        ++bonds_at[b];
        ++bonds_at[b + 1];
    }
    DenseMatrix ha = DenseMatrix::Zero(dim, dim);
    DenseMatrix hb = DenseMatrix::Zero(dim, dim);
    for (std::size_t b = 0; b + 1 < L; ++b) {
        DenseMatrix& target = b % 2 == 0 ? ha : hb;
        target -= p.J * bond_term(L, b);
        for (std::size_t j : {b, b + 1}) {
            const double w = 1.0 / bonds_at[j];
            target -= w * (p.g * site_term(L, j, 1) + p.h * site_term(L, j, 3));
        }
    }
    const DenseMatrix ua = linalg::expm_hermitian(ha, Complex(0.0, -0.5 * dt));
    const DenseMatrix ub = linalg::expm_hermitian(hb, Complex(0.0, -dt));
    step_ = ua * ub * ua;
}

DenseMatrix TrotterPropagator::evolve_matrix(const DenseMatrix& op, std::size_t steps) const {
    DenseMatrix m = op;
    for (std::size_t s = 0; s < steps; ++s) m = step_.adjoint() * m * step_;
    return m;
}

DenseOperatorVector TrotterPropagator::evolve(const DenseOperatorVector& op, std::size_t steps) const {
    require_pauli(op, "trotter");
    if (op.L != L_) throw invalid_input("trotter: length mismatch");
    return from_matrix(evolve_matrix(to_matrix(op), steps), L_);
}

DenseOperatorVector to_parallel(const DenseOperatorVector& op, const ParallelBasis& basis) {
    require_pauli(op, "to_parallel");
    DenseOperatorVector out = rotate_all(op, frame_rotation(basis));
    out.frame = Frame::parallel;
    out.angles = basis.angles;
    return out;
}

DenseOperatorVector to_pauli(const DenseOperatorVector& op, const ParallelBasis& basis) {
    if (op.frame != Frame::parallel) throw invalid_input("to_pauli: expected basis-frame coefficients");
    DenseOperatorVector out = rotate_all(op, frame_rotation(basis).transpose());
    out.frame = Frame::pauli;
    out.angles.reset();
    return out;
}

DenseOperatorVector exact_weight_sector(const DenseOperatorVector& op, SectorKind kind, std::size_t omega,
                                        const std::optional<ParallelBasis>& basis) {
    DenseOperatorVector out = op;
    if (kind != SectorKind::total) {
        if (!basis) throw invalid_input("exact_weight_sector: parallel/orthogonal sectors need a basis");
        out = in_basis(op, *basis);
    }
    for (std::size_t s = 0; s < pow4(op.L); ++s) {
        const Counts c = count_labels(s, op.L);
        const std::size_t w = kind == SectorKind::total ? c.total
                              : kind == SectorKind::parallel ? c.parallel
                                                              : c.orthogonal;
        if (w != omega) out.coefficients(Eigen::Index(s)) = 0.0;
    }
    return out;
}

DenseOperatorVector contributing_part(const DenseOperatorVector& op, const ParallelBasis& basis) {
    return exact_weight_sector(op, SectorKind::orthogonal, 0, basis);
}

DenseOperatorVector noncontributing_part(const DenseOperatorVector& op, const ParallelBasis& basis) {
    DenseOperatorVector out = in_basis(op, basis);
    out.coefficients -= contributing_part(op, basis).coefficients;
    return out;
}

WeightDensities densities(const DenseOperatorVector& op, const ParallelBasis& basis, std::size_t omega_max) {
    const DenseOperatorVector v = in_basis(op, basis);
    WeightDensities out;
    out.contributing.assign(omega_max + 1, 0.0);
    out.noncontributing.assign(omega_max + 1, 0.0);
    for (std::size_t s = 0; s < pow4(op.L); ++s) {
        const Counts c = count_labels(s, op.L);
        if (c.total > omega_max) continue;
        const double x = v.coefficients(Eigen::Index(s));
        (c.orthogonal == 0 ? out.contributing : out.noncontributing)[c.total] += x * x;
    }
    return out;
}

std::vector<double> contributions(const DenseOperatorVector& op, const ParallelBasis& basis, std::size_t omega_max) {
    const DenseOperatorVector v = in_basis(op, basis);
    std::vector<double> out(omega_max + 1, 0.0);
    for (std::size_t s = 0; s < pow4(op.L); ++s) {
        const Counts c = count_labels(s, op.L);
        if (c.orthogonal == 0 && c.total <= omega_max) out[c.total] += v.coefficients(Eigen::Index(s));
    }
    return out;
}

double expectation(const DenseOperatorVector& op, BlochAngles angles) {
    const Eigen::Vector2cd one(std::cos(angles.theta / 2),
                               std::polar(std::sin(angles.theta / 2), angles.phi));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    for (std::size_t j = 0; j < op.L; ++j) {
        Eigen::VectorXcd next(psi.size() * 2);
        for (Eigen::Index i = 0; i < psi.size(); ++i) next.segment(2 * i, 2) = psi(i) * one;
        psi = std::move(next);
    }
    const DenseOperatorVector pauli =
        op.frame == Frame::pauli ? op : to_pauli(op, parallel_basis(*op.angles));
    return (psi.adjoint() * to_matrix(pauli) * psi)(0, 0).real();
}

Eigen::VectorXd schmidt_values(const DenseOperatorVector& op, std::size_t cut) {
    if (cut < 1 || cut >= op.L) throw invalid_input("schmidt_values: cut out of range");
    const Eigen::Map<const RowMatrix> m(op.coefficients.data(), Eigen::Index(pow4(cut)),
                                        Eigen::Index(pow4(op.L - cut)));
    const RealMatrix dense = m;
    Eigen::JacobiSVD<RealMatrix> svd(dense);
    return svd.singularValues();
}

double osee(const DenseOperatorVector& op, std::size_t cut) {
    const Eigen::VectorXd s = schmidt_values(op, cut);
    const double total = s.squaredNorm();
    double h = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double p = s(i) * s(i) / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

Eigen::VectorXd apply_mpo(const Mpo& mpo, const Eigen::VectorXd& v) {
    const std::size_t L = mpo.length();
    if (std::size_t(v.size()) != pow4(L)) throw invalid_input("apply_mpo: vector length mismatch");
    // t[(out prefix, bond) , remaining input digits]
    RowMatrix t = RowMatrix(Eigen::Map<const RowMatrix>(v.data(), 1, v.size()));
    std::size_t prefix = 1;
    for (std::size_t j = 0; j < L; ++j) {
        const auto& w = mpo.sites[j];
        const std::size_t rest = pow4(L - 1 - j);
        RowMatrix next = RowMatrix::Zero(Eigen::Index(prefix * 4 * w.right), Eigen::Index(rest));
        for (std::size_t q = 0; q < prefix; ++q)
            for (std::size_t a = 0; a < w.left; ++a)
                for (std::size_t i = 0; i < 4; ++i) {
                    const auto src = t.row(Eigen::Index(q * w.left + a)).segment(Eigen::Index(i * rest), Eigen::Index(rest));
                    for (std::size_t o = 0; o < 4; ++o)
                        for (std::size_t b = 0; b < w.right; ++b) {
                            const double c = w(a, o, i, b);
                            if (c != 0.0) next.row(Eigen::Index((q * 4 + o) * w.right + b)) += c * src;
                        }
                }
        t = std::move(next);
        prefix *= 4;
    }
    return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
}

OweTrajectory exact_owe_pipeline(BlochAngles angles, PauliLabel op, std::size_t site, const QuenchParams& p,
                                 const std::vector<double>& times, std::size_t omega_star) {
    if (p.L > 6) throw resource_limit("exact_owe_pipeline: limited to 6 sites");
    if (omega_star < 1 || omega_star > p.L) throw invalid_input("exact_owe_pipeline: omega_star out of range");
    const ParallelBasis basis = parallel_basis(angles);
    const ExactPropagator prop(p);
    const DenseOperatorVector start = local_operator(op, site, p.L);
    OweTrajectory out;
    out.times = times;
    for (double t : times) {
        const DenseOperatorVector o = prop.evolve(start, t);
        out.exact.push_back(expectation(o, angles));
        out.contributions.push_back(contributions(o, basis, p.L));
        std::vector<double> probs;
        out.owe.push_back(own_owe(out.contributions.back(), out.exact.back(), omega_star, probs));
        out.probabilities.push_back(std::move(probs));
    }
    return out;
}

BackflowTrace backflow(PauliLabel op, std::size_t site, const ParallelBasis& basis, std::size_t omega_perp,
                       const QuenchParams& p, double dt, double t_max) {
    const std::size_t L = p.L;
    const TrotterPropagator prop(p, dt);
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    const DenseMatrix u_start = to_matrix(local_operator(op, site, L));

    auto monitor = [&](const DenseMatrix& m) {
        const DenseOperatorVector v = from_matrix(m, L);
        const DenseOperatorVector nc = exact_weight_sector(noncontributing_part(v, basis), SectorKind::total, omega_perp);
        return nc.coefficients.squaredNorm();
    };

    BackflowTrace out;
    std::vector<DenseMatrix> history{u_start};
    out.monitor_density.push_back(monitor(u_start));
    std::size_t peak = 0;
    for (std::size_t k = 1; k <= steps && peak == 0; ++k) {
        history.push_back(prop.evolve_matrix(history.back(), 1));
        out.monitor_density.push_back(monitor(history.back()));
        const auto& m = out.monitor_density;
        if (k >= 2 && m[k - 1] - m[k - 2] > 1e-14 && m[k] - m[k - 1] <= 0.0) peak = k - 1;
    }
    if (peak == 0) {
        std::vector<double> t(out.monitor_density.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = double(i) * dt;
        throw ProtocolIncomplete("oracle backflow: no peak", t, out.monitor_density);
    }
    out.peak_step = peak;
    out.t0 = double(peak) * dt;

    const DenseOperatorVector at_peak = from_matrix(history[peak], L);
    const DenseOperatorVector projected =
        to_pauli(exact_weight_sector(noncontributing_part(at_peak, basis), SectorKind::total, omega_perp), basis);
    DenseMatrix m = to_matrix(projected);
    for (std::size_t k = peak; k <= steps; ++k) {
        if (k > peak) m = prop.evolve_matrix(m, 1);
        const DenseOperatorVector v = from_matrix(m, L);
        out.times.push_back(double(k) * dt);
        out.overlaps.push_back(std::abs(expectation(v, basis.angles)));
        out.osee.push_back(osee(v, L / 2));
    }
    return out;
}

}  // namespace opweight::oracle
