#pragma once

#include <cstdint>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

/// Data matrix with optional entrywise weights M ∈ [0,1]. Zero-weight entries
/// are dropped, so masked products cost O(|Ω|·r) instead of O(mnr).
class WeightedData {
public:
    WeightedData(const Matrix& x, const Matrix* mask);

    const Matrix& x() const noexcept { return x_; }
    std::size_t rows() const noexcept { return x_.rows(); }
    std::size_t cols() const noexcept { return x_.cols(); }
    bool full() const noexcept { return full_; }
    std::size_t observed() const noexcept { return xv_.size(); }

    // ½‖M∘(X − WH)‖_F²
    double fit(const Matrix& w, const Matrix& h) const;
    // ‖M∘X‖_F²
    double data_norm_sq() const noexcept { return data_norm_sq_; }

    // Gradients of the fit term: (M²∘(WH − X))Hᵀ and Wᵀ(M²∘(WH − X)).
    Matrix grad_w(const Matrix& w, const Matrix& h) const;
    Matrix grad_h(const Matrix& w, const Matrix& h) const;

    // Zero outside the observed set, M²∘X inside (dense).
    Matrix weighted_x() const;

    // Mean over observed entries per row (row_wise) or overall (global).
    std::vector<double> row_means() const;
    double global_mean() const;
    std::vector<double> row_min() const;
    std::vector<double> row_max() const;

private:
    // r_k = M²(i,j)·((WH)(i,j) − X(i,j)) over the observed list
    std::vector<double> weighted_residual(const Matrix& w, const Matrix& h) const;

    Matrix x_;
    bool full_ = true;
    std::vector<std::uint32_t> ri_, ci_;
    std::vector<double> xv_, wsq_;
    double data_norm_sq_ = 0.0;
};

}  // namespace volmf
