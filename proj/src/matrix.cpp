#include "volmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volmf/error.hpp"

namespace volmf {

namespace {

void require_nonempty_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw Error(ErrorKind::InvalidInput, "matrix dimensions must be at least 1x1, got " +
                                                 std::to_string(rows) + "x" + std::to_string(cols));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require_nonempty_shape(rows, cols);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_nonempty_shape(rows, cols);
    if (data_.size() != rows * cols) {
        throw Error(ErrorKind::DimensionMismatch, "data length does not match rows*cols");
    }
    if (!all_finite()) throw Error(ErrorKind::InvalidInput, "matrix contains non-finite entries");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    require_nonempty_shape(rows_, cols_);
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::RaggedRows, "initializer rows differ in length");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    if (!all_finite()) throw Error(ErrorKind::InvalidInput, "matrix contains non-finite entries");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diag(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::column_vector(std::span<const double> v) {
    return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void Matrix::set_column(std::size_t j, std::span<const double> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matmul inner dimensions");
    Matrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matmul_tn inner dimensions");
    Matrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* bk = b.row(k).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error(ErrorKind::DimensionMismatch, "matmul_nt inner dimensions");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto ai = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(ai, b.row(j));
    }
    return c;
}

Matrix gram(const Matrix& a) {
    Matrix g = matmul_tn(a, a);
    return symmetrize(g);
}

Matrix outer_gram(const Matrix& a) {
    Matrix g(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.rows(); ++j) {
            const double v = dot(a.row(i), a.row(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k) cd[k] *= bd[k];
    return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw Error(ErrorKind::DimensionMismatch, "matvec");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

void axpy(double s, const Matrix& x, Matrix& y) {
    require_same_shape(x, y, "axpy");
    auto xd = x.data();
    auto yd = y.data();
    for (std::size_t k = 0; k < yd.size(); ++k) yd[k] += s * xd[k];
}

Matrix extrapolate(const Matrix& a, const Matrix& b, double beta) {
    require_same_shape(a, b, "extrapolate");
    Matrix c = a;
    auto cd = c.data();
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k) cd[k] = ad[k] + beta * (ad[k] - bd[k]);
    return c;
}

double frobenius_norm_sq(const Matrix& a) { return dot(a.data(), a.data()); }
double frobenius_norm(const Matrix& a) { return std::sqrt(frobenius_norm_sq(a)); }

double frobenius_dot(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "frobenius_dot");
    return dot(a.data(), b.data());
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

double max_entry(const Matrix& a) { return *std::max_element(a.data().begin(), a.data().end()); }
double min_entry(const Matrix& a) { return *std::min_element(a.data().begin(), a.data().end()); }

double trace(const Matrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

std::vector<double> column_sums(const Matrix& a) {
    std::vector<double> s(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s[j] += a(i, j);
    return s;
}

std::vector<double> row_sums(const Matrix& a) {
    std::vector<double> s(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double x : a.row(i)) s[i] += x;
    return s;
}

Matrix select_columns(const Matrix& a, std::span<const std::size_t> idx) {
    Matrix s(a.rows(), idx.size());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < idx.size(); ++k) s(i, k) = a(i, idx[k]);
    return s;
}

Matrix symmetrize(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "symmetrize needs a square matrix");
    Matrix s = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    return s;
}

void add_to_diagonal(Matrix& a, double s) {
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) a(i, i) += s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace volmf
