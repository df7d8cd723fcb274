#pragma once

#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

/// Lower-triangular Cholesky factor L with L Lᵀ = A and a strictly positive diagonal.
struct SpdFactorization {
    Matrix lower;
    double jitter = 0.0;  // diagonal shift that was needed, 0 in the common case

    std::size_t dim() const noexcept { return lower.rows(); }
};

/// Cholesky factorization. On failure the diagonal is shifted once by
/// 1e-12 * trace(A) / dim and the factorization retried; a second failure
/// throws NotPositiveDefinite.
SpdFactorization cholesky(const Matrix& a);

/// Largest singular value. Small Gram matrices (min(m, n) <= 64) are
/// diagonalized exactly with Jacobi; larger ones use power iteration on the
/// smaller of AᵀA / AAᵀ started from the normalized all-ones vector.
double spectral_norm(const Matrix& a);

/// Spectral norm inflated by a factor (1 + 1e-8), suitable as a step-size
/// Lipschitz constant (never below the true norm).
double lipschitz_constant(const Matrix& a);

Matrix spd_inverse(const Matrix& a);
Matrix spd_inverse(const SpdFactorization& f);

double logdet_spd(const Matrix& a);
double logdet_spd(const SpdFactorization& f);

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // orthonormal columns, vectors(:, k) pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Throws
/// ConvergenceFailure after 100 sweeps without convergence.
SymmetricEigen sym_eig(const Matrix& a);

/// P diag(values) Pᵀ
Matrix reconstruct(const SymmetricEigen& eig);

/// Orthonormal basis of the column space by modified Gram-Schmidt with one
/// re-orthogonalization pass. Throws RankDeficient when a column collapses
/// below rank_tol times its original norm.
Matrix orthonormal_basis(const Matrix& a, double rank_tol = 1e-10);

}  // namespace volmf
