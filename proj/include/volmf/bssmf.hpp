#pragma once

#include <optional>
#include <vector>

#include "volmf/matrix.hpp"
#include "volmf/projections.hpp"
#include "volmf/solver.hpp"

namespace volmf {

struct BssmfProblem {
    Matrix x;
    std::optional<Matrix> mask;
    Bounds bounds;
    Centering centering = Centering::none;

    // a_i, b_i = smallest and largest observed entry of row i.
    static Bounds auto_bounds(const Matrix& x, const Matrix* mask = nullptr);
};

struct CenteredData {
    Matrix xc;
    std::vector<double> mu;
};

/// Xc = X − μeᵀ; with a mask the means run over observed entries only.
CenteredData center_data(const Matrix& x, Centering mode, const Matrix* mask = nullptr);
/// W = Wc + μeᵀ
Matrix uncenter_w(const Matrix& wc, const std::vector<double>& mu);

/// Xn = (X − aeᵀ) ⊘ ((b − a)eᵀ); throws DegenerateRow when a_i = b_i.
Matrix normalize_to_unit_box(const Matrix& x, const Bounds& bounds);
Matrix denormalize_from_unit_box(const Matrix& xn, const Bounds& bounds);

/// W(i,:) ~ U[a_i, b_i]; H ~ U[0,1] projected columnwise onto the simplex.
FactorPair bssmf_init(const Bounds& bounds, std::size_t n, std::size_t rank, std::uint64_t seed);

/// ½‖M∘(X − WH)‖_F² with H column-stochastic and W(:,k) ∈ [a,b].
FitResult bssmf_fit(const BssmfProblem& problem, const SolverOptions& opts);
FitResult bssmf_fit(const BssmfProblem& problem, const SolverOptions& opts, FactorPair init);

/// Runs `starts` fits with seeds opts.seed, opts.seed+1, … and keeps the one
/// with the smallest final objective (lowest seed on ties).
FitResult bssmf_best_of(const BssmfProblem& problem, const SolverOptions& opts, std::size_t starts);

}  // namespace volmf
