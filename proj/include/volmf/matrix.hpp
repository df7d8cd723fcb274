#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace volmf {

/// Row-major dense matrix of doubles.
///
/// Sized constructors require rows >= 1 and cols >= 1; the default-constructed
/// matrix is the only empty value and means "not set". Constructors taking
/// external data reject non-finite entries.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diag(std::span<const double> d);
    static Matrix column_vector(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> v);

    bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);     // A B
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // Aᵀ B
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // A Bᵀ
Matrix gram(const Matrix& a);                        // Aᵀ A
Matrix outer_gram(const Matrix& a);                  // A Aᵀ
Matrix hadamard(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// y += s * x
void axpy(double s, const Matrix& x, Matrix& y);
// a + beta (a - b), the extrapolated point used by every inertial scheme.
Matrix extrapolate(const Matrix& a, const Matrix& b, double beta);

double frobenius_norm(const Matrix& a);
double frobenius_norm_sq(const Matrix& a);
double frobenius_dot(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);
double max_entry(const Matrix& a);
double min_entry(const Matrix& a);
double trace(const Matrix& a);
std::vector<double> column_sums(const Matrix& a);
std::vector<double> row_sums(const Matrix& a);
Matrix select_columns(const Matrix& a, std::span<const std::size_t> idx);
Matrix symmetrize(const Matrix& a);
void add_to_diagonal(Matrix& a, double s);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

}  // namespace volmf
