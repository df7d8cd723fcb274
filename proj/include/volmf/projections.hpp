#pragma once

#include <limits>
#include <span>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

/// Per-row interval [a_i, b_i]. An infinite endpoint (±infinity) means that
/// side is unbounded; CSV files encode it as ±1.7976931348623157e308.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    static Bounds uniform(std::size_t m, double a, double b);
    std::size_t size() const noexcept { return lower.size(); }
    // Throws InvalidBounds unless lower[i] <= upper[i] for every i.
    void validate() const;
};

/// Threshold ν with Σ max(q_i − ν, 0) = scale.
double simplex_threshold(std::span<const double> q, double scale = 1.0);
/// Same, for q already sorted in descending order.
double simplex_threshold_sorted(std::span<const double> q_desc, double scale = 1.0);

/// Euclidean projection of a vector onto {y ≥ 0, Σ y = scale}.
std::vector<double> project_simplex(std::span<const double> q, double scale = 1.0);

/// Column-wise projection onto the scaled probability simplex.
Matrix project_simplex_columns(const Matrix& a, double scale = 1.0);
void project_simplex_columns_inplace(Matrix& a, double scale = 1.0);

/// out(i,k) = clamp(a(i,k), lower_i, upper_i).
Matrix project_box_columns(const Matrix& a, const Bounds& bounds);
void project_box_columns_inplace(Matrix& a, const Bounds& bounds);

Matrix project_nonneg(const Matrix& a);
void project_nonneg_inplace(Matrix& a);

}  // namespace volmf
