#include "volmf/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "volmf/error.hpp"

namespace volmf {

namespace {

// A column already on the simplex (to rounding) is returned untouched so
// that every projection is exactly idempotent.
bool already_feasible(std::span<const double> q, double scale) {
    double sum = 0.0;
    for (double x : q) {
        if (x < 0.0) return false;
        sum += x;
    }
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * scale * static_cast<double>(q.size());
    return std::abs(sum - scale) <= slack;
}

}  // namespace

Bounds Bounds::uniform(std::size_t m, double a, double b) {
    Bounds bounds{std::vector<double>(m, a), std::vector<double>(m, b)};
    bounds.validate();
    return bounds;
}

void Bounds::validate() const {
    if (lower.size() != upper.size()) throw Error(ErrorKind::DimensionMismatch, "bounds vectors differ in length");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
            throw Error(ErrorKind::InvalidBounds, "a_" + std::to_string(i) + " > b_" + std::to_string(i));
        }
    }
}

double simplex_threshold_sorted(std::span<const double> q_desc, double scale) {
    // largest k with q_(k) - (Σ_{j≤k} q_(j) - scale)/k > 0
    double cumsum = 0.0;
    double nu = q_desc.empty() ? 0.0 : q_desc[0] - scale;
    for (std::size_t k = 0; k < q_desc.size(); ++k) {
        cumsum += q_desc[k];
        const double candidate = (cumsum - scale) / static_cast<double>(k + 1);
        if (q_desc[k] - candidate > 0.0) nu = candidate;
        else break;
    }
    return nu;
}

double simplex_threshold(std::span<const double> q, double scale) {
    std::vector<double> sorted(q.begin(), q.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return simplex_threshold_sorted(sorted, scale);
}

std::vector<double> project_simplex(std::span<const double> q, double scale) {
    std::vector<double> y(q.begin(), q.end());
    if (already_feasible(q, scale)) return y;
    const double nu = simplex_threshold(q, scale);
    for (double& v : y) v = std::max(v - nu, 0.0);
    return y;
}

void project_simplex_columns_inplace(Matrix& a, double scale) {
    std::vector<double> col(a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) col[i] = a(i, j);
        if (already_feasible(col, scale)) continue;
        const double nu = simplex_threshold(col, scale);
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) = std::max(col[i] - nu, 0.0);
    }
}

Matrix project_simplex_columns(const Matrix& a, double scale) {
    Matrix out = a;
    project_simplex_columns_inplace(out, scale);
    return out;
}

void project_box_columns_inplace(Matrix& a, const Bounds& bounds) {
    if (bounds.size() != a.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "bounds length " + std::to_string(bounds.size()) +
                                                      " does not match " + std::to_string(a.rows()) + " rows");
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double lo = bounds.lower[i];
        const double hi = bounds.upper[i];
        for (double& x : a.row(i)) x = std::clamp(x, lo, hi);
    }
}

Matrix project_box_columns(const Matrix& a, const Bounds& bounds) {
    Matrix out = a;
    project_box_columns_inplace(out, bounds);
    return out;
}

void project_nonneg_inplace(Matrix& a) {
    for (double& x : a.data()) x = std::max(x, 0.0);
}

Matrix project_nonneg(const Matrix& a) {
    Matrix out = a;
    project_nonneg_inplace(out);
    return out;
}

}  // namespace volmf
