#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

struct NnlsResult {
    Matrix h;
    bool converged = false;   // false means the iteration budget ran out (IterationBudgetExceeded)
    int iterations = 0;
    double max_kkt_ratio = 0.0;  // max_j ‖min(h_j, ∇_j)‖∞ / ‖WᵀX(:,j)‖∞
};

/// Column-wise nonnegative least squares min_{H≥0} ½‖X − WH‖_F² by
/// accelerated projected gradient with adaptive restart. Stops when every
/// column satisfies ‖min(h, ∇)‖∞ ≤ kkt_tol·‖WᵀX(:,j)‖∞ or after max_iter steps.
NnlsResult nnls_solve(const Matrix& w, const Matrix& x, int max_iter = 2000, double kkt_tol = 1e-6);

struct VectorNnlsResult {
    std::vector<double> y;
    double residual_norm = 0.0;
};

/// Lawson-Hanson active-set NNLS for a single right-hand side. Exact up to
/// rounding, and does not need A to have full column rank.
VectorNnlsResult nnls_active_set(const Matrix& a, std::span<const double> b);

struct RandSpaConfig {
    std::size_t rank = 1;
    std::size_t nu = 1;     // columns of Q
    double kappa = 1.0;     // condition number of QQᵀ
    std::size_t runs = 1;
    std::uint64_t seed = 0;

    void validate(std::size_t m) const;
    // ν ≥ r is the regime with robustness guarantees; not enforced.
    bool provable() const noexcept { return nu >= rank; }
};

struct SelectionResult {
    std::vector<std::size_t> indices;        // 0-based, distinct, in selection order
    std::vector<double> residual_norms;      // ‖P⊥X(:,j_k)‖₂ before each deflation
    std::vector<double> selection_values;    // f(P⊥X(:,j_k)) at selection time
    Matrix basis;                            // V = [v_1 … v_r], P⊥ = I − VVᵀ
    Matrix h;                                // NNLS coefficients for X ≈ X(:,J) H
    double relative_error = 0.0;
    bool nnls_converged = true;
};

/// Greedy selection maximizing f(P⊥x) with f(x) = xᵀQQᵀx (‖x‖² when q is
/// absent), followed by NNLS for H. Ties go to the lowest column index.
SelectionResult spa_select(const Matrix& x, std::size_t r, const std::optional<Matrix>& q = std::nullopt);

/// Random Q (m × ν) with mutually orthogonal columns, ‖Q(:,1)‖ = 1 and
/// ‖Q(:,j)‖ = 1/√κ for j ≥ 2. Deterministic in (seed, run_index, step).
Matrix gen_random_q(std::size_t m, const RandSpaConfig& config, std::size_t run_index, std::size_t step);

/// Best of config.runs randomized selections, a fresh Q per extraction step.
/// The run with the smallest relative error wins; ties go to the lower run.
SelectionResult randspa(const Matrix& x, const RandSpaConfig& config);

}  // namespace volmf
