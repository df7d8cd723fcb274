#include "volmf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "volmf/error.hpp"

namespace volmf {

namespace {

constexpr std::size_t kExactGramLimit = 64;
constexpr int kPowerMaxIter = 500;
constexpr double kPowerTol = 1e-10;
constexpr int kJacobiMaxSweeps = 100;

std::optional<Matrix> try_cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

void require_square(const Matrix& a, const char* what) {
    if (a.empty() || a.rows() != a.cols()) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " needs a square matrix");
    }
}

double power_iteration_top_eigenvalue(const Matrix& g) {
    const std::size_t n = g.rows();
    auto run = [&](std::vector<double> v) -> std::optional<double> {
        double lambda = 0.0;
        int stalled = 0;
        for (int it = 0; it < kPowerMaxIter; ++it) {
            std::vector<double> w = matvec(g, v);
            const double nw = norm2(w);
            if (nw == 0.0) return std::nullopt;  // start vector in the null space
            const double next = dot(v, w);
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
            const double change = std::abs(next - lambda);
            if (change <= kPowerTol * std::abs(next)) {
                // a stalled Rayleigh quotient with a large residual means v is
                // trapped near a non-dominant eigenvector
                std::vector<double> gv = matvec(g, v);
                double res = 0.0;
                for (std::size_t i = 0; i < n; ++i) res += (gv[i] - next * v[i]) * (gv[i] - next * v[i]);
                if (std::sqrt(res) <= 1e-6 * std::abs(next) || ++stalled >= 3) return next;
            }
            lambda = next;
        }
        return lambda;
    };

    std::vector<double> ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (auto v = run(ones)) return *v;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> e(n, 0.0);
        e[k] = 1.0;
        if (auto v = run(e)) return *v;
    }
    return 0.0;
}

}  // namespace

SpdFactorization cholesky(const Matrix& a) {
    require_square(a, "cholesky");
    if (auto l = try_cholesky(a)) return {std::move(*l), 0.0};
    const double jitter = 1e-12 * std::abs(trace(a)) / static_cast<double>(a.rows());
    Matrix shifted = a;
    add_to_diagonal(shifted, jitter);
    if (auto l = try_cholesky(shifted)) return {std::move(*l), jitter};
    throw Error(ErrorKind::NotPositiveDefinite, "Cholesky failed after one jitter escalation");
}

double spectral_norm(const Matrix& a) {
    if (a.empty()) return 0.0;
    const Matrix g = a.rows() < a.cols() ? outer_gram(a) : gram(a);
    if (max_abs(g) == 0.0) return 0.0;
    double top;
    if (g.rows() <= kExactGramLimit) {
        top = sym_eig(g).values.front();
    } else {
        top = power_iteration_top_eigenvalue(g);
    }
    return std::sqrt(std::max(top, 0.0));
}

double lipschitz_constant(const Matrix& a) { return spectral_norm(a) * (1.0 + 1e-8); }

Matrix spd_inverse(const SpdFactorization& f) {
    const Matrix& l = f.lower;
    const std::size_t n = l.rows();
    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹
    Matrix linv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        linv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= l(i, k) * linv(k, j);
            linv(i, j) = s / l(i, i);
        }
    }
    Matrix inv = matmul_tn(linv, linv);
    return symmetrize(inv);
}

Matrix spd_inverse(const Matrix& a) { return spd_inverse(cholesky(a)); }

double logdet_spd(const SpdFactorization& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i) s += std::log(f.lower(i, i));
    return 2.0 * s;
}

double logdet_spd(const Matrix& a) { return logdet_spd(cholesky(a)); }

SymmetricEigen sym_eig(const Matrix& a) {
    require_square(a, "sym_eig");
    const std::size_t n = a.rows();
    Matrix s = symmetrize(a);
    Matrix v = Matrix::identity(n);

    auto off_norm = [&] {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        return std::sqrt(2.0 * off);
    };
    const double scale = frobenius_norm(s);

    bool converged = n == 1 || scale == 0.0;
    for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
        if (off_norm() <= 1e-15 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0.0) continue;
                const double app = s(p, p);
                const double aqq = s(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p);
                    const double skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k);
                    const double sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                s(p, q) = 0.0;
                s(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && off_norm() > 1e-15 * scale) {
        throw Error(ErrorKind::ConvergenceFailure, "Jacobi eigensolver exceeded 100 sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return s(i, i) > s(j, j); });

    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = s(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

Matrix reconstruct(const SymmetricEigen& eig) {
    Matrix scaled = eig.vectors;
    for (std::size_t i = 0; i < scaled.rows(); ++i)
        for (std::size_t k = 0; k < scaled.cols(); ++k) scaled(i, k) *= eig.values[k];
    return symmetrize(matmul_nt(scaled, eig.vectors));
}

Matrix orthonormal_basis(const Matrix& a, double rank_tol) {
    const std::size_t m = a.rows();
    const std::size_t r = a.cols();
    if (r > m) throw Error(ErrorKind::RankDeficient, "more columns than rows");
    Matrix q(m, r);
    for (std::size_t k = 0; k < r; ++k) {
        std::vector<double> v = a.column(k);
        const double original = norm2(v);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k; ++j) {
                double proj = 0.0;
                for (std::size_t i = 0; i < m; ++i) proj += q(i, j) * v[i];
                for (std::size_t i = 0; i < m; ++i) v[i] -= proj * q(i, j);
            }
        }
        const double nv = norm2(v);
        if (original == 0.0 || nv <= rank_tol * original) {
            throw Error(ErrorKind::RankDeficient, "column " + std::to_string(k) + " is numerically dependent");
        }
        for (std::size_t i = 0; i < m; ++i) q(i, k) = v[i] / nv;
    }
    return q;
}

}  // namespace volmf
