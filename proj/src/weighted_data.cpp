#include "volmf/weighted_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volmf/error.hpp"

namespace volmf {

WeightedData::WeightedData(const Matrix& x, const Matrix* mask) : x_(x) {
    if (x.empty()) throw Error(ErrorKind::InvalidInput, "data matrix is empty");
    if (mask) {
        require_same_shape(x, *mask, "mask");
        for (double v : mask->data())
            if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidInput, "mask entries must lie in [0,1]");
    }
    full_ = !mask || std::all_of(mask->data().begin(), mask->data().end(), [](double v) { return v == 1.0; });
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double m = mask ? (*mask)(i, j) : 1.0;
            if (m == 0.0) continue;
            ri_.push_back(static_cast<std::uint32_t>(i));
            ci_.push_back(static_cast<std::uint32_t>(j));
            xv_.push_back(x(i, j));
            wsq_.push_back(m * m);
            data_norm_sq_ += m * m * x(i, j) * x(i, j);
        }
    if (xv_.empty()) throw Error(ErrorKind::EmptyMask, "mask has no observed entries");
}

std::vector<double> WeightedData::weighted_residual(const Matrix& w, const Matrix& h) const {
    if (w.rows() != rows() || h.cols() != cols() || w.cols() != h.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "factor shapes do not conform to X");
    }
    const std::size_t r = w.cols();
    const std::size_t n = h.cols();
    const auto hd = h.data();
    std::vector<double> res(xv_.size());
    for (std::size_t k = 0; k < xv_.size(); ++k) {
        const auto wr = w.row(ri_[k]);
        const std::size_t j = ci_[k];
        double s = 0.0;
        for (std::size_t a = 0; a < r; ++a) s += wr[a] * hd[a * n + j];
        res[k] = wsq_[k] * (s - xv_[k]);
    }
    return res;
}

double WeightedData::fit(const Matrix& w, const Matrix& h) const {
    if (full_) {
        Matrix diff = matmul(w, h);
        diff -= x_;
        return 0.5 * frobenius_norm_sq(diff);
    }
    const std::vector<double> res = weighted_residual(w, h);
    double s = 0.0;
    for (std::size_t k = 0; k < res.size(); ++k) s += res[k] * res[k] / wsq_[k];
    return 0.5 * s;
}

Matrix WeightedData::grad_w(const Matrix& w, const Matrix& h) const {
    if (full_) {
        Matrix diff = matmul(w, h);
        diff -= x_;
        return matmul_nt(diff, h);
    }
    const std::vector<double> res = weighted_residual(w, h);
    const std::size_t r = w.cols();
    const std::size_t n = h.cols();
    const auto hd = h.data();
    Matrix g(w.rows(), r);
    for (std::size_t k = 0; k < res.size(); ++k) {
        auto gr = g.row(ri_[k]);
        const std::size_t j = ci_[k];
        for (std::size_t a = 0; a < r; ++a) gr[a] += res[k] * hd[a * n + j];
    }
    return g;
}

Matrix WeightedData::grad_h(const Matrix& w, const Matrix& h) const {
    if (full_) {
        Matrix diff = matmul(w, h);
        diff -= x_;
        return matmul_tn(w, diff);
    }
    const std::vector<double> res = weighted_residual(w, h);
    const std::size_t r = w.cols();
    const std::size_t n = h.cols();
    Matrix g(r, n);
    auto gd = g.data();
    for (std::size_t k = 0; k < res.size(); ++k) {
        const auto wr = w.row(ri_[k]);
        const std::size_t j = ci_[k];
        for (std::size_t a = 0; a < r; ++a) gd[a * n + j] += res[k] * wr[a];
    }
    return g;
}

Matrix WeightedData::weighted_x() const {
    Matrix out(rows(), cols());
    for (std::size_t k = 0; k < xv_.size(); ++k) out(ri_[k], ci_[k]) = wsq_[k] * xv_[k];
    return out;
}

std::vector<double> WeightedData::row_means() const {
    std::vector<double> sum(rows(), 0.0);
    std::vector<double> cnt(rows(), 0.0);
    for (std::size_t k = 0; k < xv_.size(); ++k) {
        sum[ri_[k]] += xv_[k];
        cnt[ri_[k]] += 1.0;
    }
    for (std::size_t i = 0; i < rows(); ++i) sum[i] = cnt[i] > 0.0 ? sum[i] / cnt[i] : 0.0;
    return sum;
}

double WeightedData::global_mean() const {
    double s = 0.0;
    for (double v : xv_) s += v;
    return s / static_cast<double>(xv_.size());
}

std::vector<double> WeightedData::row_min() const {
    std::vector<double> out(rows(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < xv_.size(); ++k) out[ri_[k]] = std::min(out[ri_[k]], xv_[k]);
    return out;
}

std::vector<double> WeightedData::row_max() const {
    std::vector<double> out(rows(), -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < xv_.size(); ++k) out[ri_[k]] = std::max(out[ri_[k]], xv_[k]);
    return out;
}

}  // namespace volmf
