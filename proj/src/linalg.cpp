#include "opweight/linalg.hpp"

#include <array>
#include <cmath>
#include <string>

#include "opweight/error.hpp"

namespace opweight::linalg {
namespace {

template <typename Matrix>
SvdResult<Matrix> svd_truncated_impl(const Matrix& m, std::size_t chi_max, double lambda2_cutoff) {
    if (!m.allFinite()) {
        throw invalid_input("svd_truncated: non-finite matrix entries");
    }
    if (lambda2_cutoff < 0.0) {
        throw invalid_input("svd_truncated: negative lambda2 cutoff");
    }
    // Golub-Kahan bidiagonalisation with divide and conquer; Eigen falls back
    // to one-sided Jacobi for small blocks. Both are deterministic.
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw numerical_failure("svd_truncated: SVD did not converge");
    }
    const Eigen::VectorXd& s = svd.singularValues();
    if (!s.allFinite()) {
        throw numerical_failure("svd_truncated: SVD produced non-finite singular values");
    }

    SvdResult<Matrix> out;
    const Eigen::Index full = s.size();
    double total = 0.0;
    for (Eigen::Index k = 0; k < full; ++k) total += s(k) * s(k);
    out.total_weight = total;

    Eigen::Index keep = full;
    if (total > 0.0 && lambda2_cutoff > 0.0) {
        while (keep > 1 && s(keep - 1) * s(keep - 1) < lambda2_cutoff * total) --keep;
    }
    if (chi_max > 0 && keep > static_cast<Eigen::Index>(chi_max)) keep = static_cast<Eigen::Index>(chi_max);
    if (keep < 1) keep = 1;

    double discarded = 0.0;
    for (Eigen::Index k = keep; k < full; ++k) discarded += s(k) * s(k);
    out.discarded_weight = discarded;
    out.singular_values = s.head(keep);
    out.left = svd.matrixU().leftCols(keep);
    out.right = svd.matrixV().leftCols(keep).adjoint();
    return out;
}

}  // namespace

SvdResult<RealMatrix> svd_truncated(const RealMatrix& m, std::size_t chi_max, double lambda2_cutoff) {
    return svd_truncated_impl(m, chi_max, lambda2_cutoff);
}

SvdResult<DenseMatrix> svd_truncated(const DenseMatrix& m, std::size_t chi_max, double lambda2_cutoff) {
    return svd_truncated_impl(m, chi_max, lambda2_cutoff);
}

bool is_hermitian(const DenseMatrix& h, double tol) {
    if (h.rows() != h.cols()) return false;
    const double scale = std::max(1.0, h.norm());
    return (h - h.adjoint()).norm() <= tol * scale;
}

EighResult<DenseMatrix> eigh(const DenseMatrix& h) {
    if (!h.allFinite() || !is_hermitian(h)) {
        throw invalid_input("eigh: input is not a finite Hermitian matrix");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw numerical_failure("eigh: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

EighResult<RealMatrix> eigh(const RealMatrix& h) {
    if (h.rows() != h.cols() || !h.allFinite() ||
        (h - h.transpose()).norm() > 1e-12 * std::max(1.0, h.norm())) {
        throw invalid_input("eigh: input is not a finite symmetric matrix");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw numerical_failure("eigh: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

DenseMatrix expm_hermitian(const DenseMatrix& h, Complex scale) {
    const auto [values, vectors] = eigh(h);
    Eigen::VectorXcd phases(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) phases(k) = std::exp(scale * values(k));
    return vectors * phases.asDiagonal() * vectors.adjoint();
}

template <typename Matrix>
static Matrix kron_impl(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) { return kron_impl(a, b); }
RealMatrix kron(const RealMatrix& a, const RealMatrix& b) { return kron_impl(a, b); }

const Eigen::Matrix2cd& pauli(int index) {
    static const std::array<Eigen::Matrix2cd, 4> table = [] {
        std::array<Eigen::Matrix2cd, 4> t;
        const Complex i{0.0, 1.0};
        t[0] << 1, 0, 0, 1;
        t[1] << 0, 1, 1, 0;
        t[2] << 0, -i, i, 0;
        t[3] << 1, 0, 0, -1;
        return t;
    }();
    if (index < 0 || index > 3) throw invalid_input("pauli: index " + std::to_string(index) + " out of range");
    return table[static_cast<std::size_t>(index)];
}

}  // namespace opweight::linalg
