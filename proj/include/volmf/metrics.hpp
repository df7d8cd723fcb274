#pragma once

#include <optional>
#include <span>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

struct EvaluationReport {
    double relative_error = 0.0;
    std::optional<double> rmse_unobserved;
    std::optional<double> mrsa_mean;
    std::optional<double> subspace_angle_rad;
};

/// ‖M∘(X−WH)‖_F / ‖M∘X‖_F, with M = all-ones when mask is null.
double relative_error(const Matrix& x, const Matrix& w, const Matrix& h, const Matrix* mask = nullptr);

/// sqrt(‖P_Ω̄(X − WH)‖_F² / |Ω̄|) over the entries where mask == 0.
double rmse_unobserved(const Matrix& x_full, const Matrix& w, const Matrix& h, const Matrix& mask);

/// Mean-removed spectral angle scaled to [0, 100].
double mrsa(std::span<const double> a, std::span<const double> b);

struct MrsaMatch {
    double mean = 0.0;
    std::vector<std::size_t> permutation;  // estimate column permutation[k] matches truth column k
};

/// Mean column-wise MRSA under the best column permutation: exhaustive for
/// r <= 8, greedy assignment refined by pairwise swaps for 8 < r <= 12.
MrsaMatch mrsa_matched(const Matrix& w_true, const Matrix& w_est);

/// Largest principal angle between the column spaces, in [0, π/2].
double subspace_angle(const Matrix& w, const Matrix& w_est);

}  // namespace volmf
