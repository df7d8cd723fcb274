#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <limits>
#include <span>
#include <vector>

#include <unistd.h>

#include "volmf/linalg.hpp"
#include "volmf/matrix.hpp"
#include "volmf/rng.hpp"

namespace volmf::testing {

inline Matrix random_spd(Rng& rng, std::size_t n, double shift = 0.5) {
    Matrix a = rng.normal_matrix(n, n);
    Matrix s = gram(a);
    add_to_diagonal(s, shift);
    return s;
}

inline Matrix random_column_stochastic(Rng& rng, std::size_t r, std::size_t n) {
    Matrix h = rng.uniform_matrix(r, n);
    const auto sums = column_sums(h);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) /= sums[j];
    return h;
}

// Euclidean projection onto {y >= 0, sum y = scale} by enumerating every
// support set; exact for short vectors.
inline std::vector<double> brute_force_simplex(std::span<const double> q, double scale = 1.0) {
    const std::size_t n = q.size();
    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                sum += q[i];
                ++k;
            }
        }
        const double shift = (sum - scale) / static_cast<double>(k);
        std::vector<double> y(n, 0.0);
        bool feasible = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (1u << i))) continue;
            y[i] = q[i] - shift;
            if (y[i] < 0.0) feasible = false;
        }
        if (!feasible) continue;
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += (y[i] - q[i]) * (y[i] - q[i]);
        if (d < best_dist) {
            best_dist = d;
            best = y;
        }
    }
    return best;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

// Relative Frobenius distance ‖a − b‖ / max(‖b‖, tiny).
inline double rel_diff(const Matrix& a, const Matrix& b) {
    return frobenius_norm(a - b) / std::max(frobenius_norm(b), 1e-300);
}

template <class F>
Matrix central_difference(const Matrix& at, F&& f, double h = 1e-6) {
    Matrix g(at.rows(), at.cols());
    for (std::size_t i = 0; i < at.rows(); ++i) {
        for (std::size_t j = 0; j < at.cols(); ++j) {
            Matrix p = at;
            Matrix m = at;
            p(i, j) += h;
            m(i, j) -= h;
            g(i, j) = (f(p) - f(m)) / (2.0 * h);
        }
    }
    return g;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("volmf-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace volmf::testing
