#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace opweight {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace linalg {

/// Truncated factorisation m ≈ left · diag(singular_values) · right.
/// `right` holds the retained rows of V†, so right·right† = 1.
template <typename Matrix>
struct SvdResult {
    Matrix left;
    Eigen::VectorXd singular_values;
    Matrix right;
    double discarded_weight = 0.0;  // Σ dropped λ²
    double total_weight = 0.0;      // Σ all λ² = ‖m‖²_F
};

/// Deterministic SVD followed by truncation. Singular values with
/// λ²/Σλ² < lambda2_cutoff are dropped first, then the spectrum is capped at
/// chi_max (0 = no cap). At least one value is always kept.
SvdResult<RealMatrix> svd_truncated(const RealMatrix& m, std::size_t chi_max, double lambda2_cutoff);
SvdResult<DenseMatrix> svd_truncated(const DenseMatrix& m, std::size_t chi_max, double lambda2_cutoff);

template <typename Matrix>
struct EighResult {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // columns
};

EighResult<DenseMatrix> eigh(const DenseMatrix& h);
EighResult<RealMatrix> eigh(const RealMatrix& h);

/// V·exp(scale·Λ)·V† for Hermitian h = V·Λ·V†.
DenseMatrix expm_hermitian(const DenseMatrix& h, Complex scale);

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

/// Single-site Pauli matrix, index 0 = identity, 1 = x, 2 = y, 3 = z.
const Eigen::Matrix2cd& pauli(int index);

bool is_hermitian(const DenseMatrix& h, double tol = 1e-12);

}  // namespace linalg
}  // namespace opweight
