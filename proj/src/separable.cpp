#include "volmf/separable.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "volmf/error.hpp"
#include "volmf/linalg.hpp"
#include "volmf/metrics.hpp"
#include "volmf/projections.hpp"
#include "volmf/rng.hpp"

namespace volmf {

namespace {

// Largest entry of |min(h, ∇)| per column divided by the column scale.
double kkt_ratio(const Matrix& h, const Matrix& grad, const std::vector<double>& scale) {
    double worst = 0.0;
    for (std::size_t j = 0; j < h.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < h.rows(); ++i) col = std::max(col, std::abs(std::min(h(i, j), grad(i, j))));
        worst = std::max(worst, scale[j] > 0.0 ? col / scale[j] : (col > 0.0 ? col / 1e-300 : 0.0));
    }
    return worst;
}

// Solves (AᵀA)_PP y_P = (Aᵀb)_P on the passive set.
std::vector<double> passive_least_squares(const Matrix& ata, const std::vector<double>& atb,
                                          const std::vector<std::size_t>& passive) {
    const std::size_t p = passive.size();
    Matrix sub(p, p);
    std::vector<double> rhs(p);
    double tr = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
        rhs[a] = atb[passive[a]];
        for (std::size_t b = 0; b < p; ++b) sub(a, b) = ata(passive[a], passive[b]);
        tr += sub(a, a);
    }
    // a dependent passive column is damped rather than rejected
    add_to_diagonal(sub, 1e-14 * std::max(tr, 1e-300) / static_cast<double>(p));
    const Matrix inv = spd_inverse(sub);
    return matvec(inv, rhs);
}

struct Selection {
    std::vector<std::size_t> indices;
    std::vector<double> residual_norms;
    std::vector<double> values;
    Matrix basis;
};

// Greedy selection; q_for_step(k) returns the Q used at step k, or nullopt
// for the plain squared-norm criterion.
Selection select_columns_greedy(const Matrix& x, std::size_t r,
                                const std::function<std::optional<Matrix>(std::size_t)>& q_for_step) {
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    if (r == 0 || r > std::min(m, n)) {
        throw Error(ErrorKind::InvalidInput, "rank must satisfy 1 <= r <= min(m, n)");
    }
    const double guard = 1e-14 * frobenius_norm_sq(x);
    Matrix residual = x;
    Selection sel{{}, {}, {}, Matrix(m, r)};
    std::vector<double> f(n);

    for (std::size_t k = 0; k < r; ++k) {
        const std::optional<Matrix> q = q_for_step(k);
        if (q) {
            if (q->rows() != m) throw Error(ErrorKind::DimensionMismatch, "Q must have as many rows as X");
            const Matrix proj = matmul_tn(*q, residual);  // ν × n
            std::fill(f.begin(), f.end(), 0.0);
            for (std::size_t a = 0; a < proj.rows(); ++a)
                for (std::size_t j = 0; j < n; ++j) f[j] += proj(a, j) * proj(a, j);
        } else {
            std::fill(f.begin(), f.end(), 0.0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) f[j] += residual(i, j) * residual(i, j);
        }
        std::size_t best = 0;
        for (std::size_t j = 1; j < n; ++j)
            if (f[j] > f[best]) best = j;
        if (!(f[best] > guard)) {
            throw Error(ErrorKind::ZeroResidual, "residual vanished after " + std::to_string(k) + " selections");
        }

        std::vector<double> v = residual.column(best);
        const double nv = norm2(v);
        if (nv == 0.0) throw Error(ErrorKind::ZeroResidual, "selected column has a zero residual");
        for (double& vi : v) vi /= nv;

        sel.indices.push_back(best);
        sel.residual_norms.push_back(nv);
        sel.values.push_back(f[best]);
        sel.basis.set_column(k, v);

        // R ← R − v (vᵀR)
        std::vector<double> vr(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) vr[j] += v[i] * residual(i, j);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) residual(i, j) -= v[i] * vr[j];
    }
    return sel;
}

SelectionResult finish_with_nnls(const Matrix& x, Selection sel) {
    SelectionResult out;
    out.indices = std::move(sel.indices);
    out.residual_norms = std::move(sel.residual_norms);
    out.selection_values = std::move(sel.values);
    out.basis = std::move(sel.basis);
    const Matrix w = select_columns(x, out.indices);
    NnlsResult nn = nnls_solve(w, x);
    out.h = std::move(nn.h);
    out.nnls_converged = nn.converged;
    out.relative_error = relative_error(x, w, out.h);
    return out;
}

bool is_plain_spa(const RandSpaConfig& c, std::size_t m) { return c.nu == m && c.kappa == 1.0; }

}  // namespace

NnlsResult nnls_solve(const Matrix& w, const Matrix& x, int max_iter, double kkt_tol) {
    if (w.rows() != x.rows()) throw Error(ErrorKind::DimensionMismatch, "nnls_solve: W and X row counts differ");
    const std::size_t r = w.cols();
    const std::size_t n = x.cols();
    const Matrix g = gram(w);
    const Matrix b = matmul_tn(w, x);
    std::vector<double> scale(n, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) scale[j] = std::max(scale[j], std::abs(b(i, j)));

    const double lip = lipschitz_constant(g);
    NnlsResult res{Matrix(r, n), false, 0, 0.0};
    if (lip == 0.0) {
        res.converged = true;
        return res;
    }

    const double step = 1.0 / lip;
    auto gradient = [&](const Matrix& y) {
        Matrix gr = matmul(g, y);
        gr -= b;
        return gr;
    };

    Matrix h = project_nonneg(b * step);
    Matrix y = h;
    double t = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        Matrix h_new = y;
        axpy(-step, gradient(y), h_new);
        project_nonneg_inplace(h_new);
        // restart when the momentum direction opposes the gradient step
        double restart_test = 0.0;
        {
            auto yd = y.data();
            auto hn = h_new.data();
            auto ho = h.data();
            for (std::size_t k = 0; k < yd.size(); ++k) restart_test += (yd[k] - hn[k]) * (hn[k] - ho[k]);
        }
        double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (restart_test > 0.0) {
            t = 1.0;
            t_new = 1.0;
            y = h_new;
        } else {
            y = extrapolate(h_new, h, (t - 1.0) / t_new);
        }
        h = std::move(h_new);
        t = t_new;
        res.iterations = it;
        if (it % 10 == 0 || it == max_iter) {
            res.max_kkt_ratio = kkt_ratio(h, gradient(h), scale);
            if (res.max_kkt_ratio <= kkt_tol) {
                res.converged = true;
                break;
            }
        }
    }
    res.h = std::move(h);
    return res;
}

VectorNnlsResult nnls_active_set(const Matrix& a, std::span<const double> b) {
    if (a.rows() != b.size()) throw Error(ErrorKind::DimensionMismatch, "nnls_active_set: A and b differ in length");
    const std::size_t n = a.cols();
    const Matrix ata = gram(a);
    std::vector<double> atb(n, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) atb[j] += a(i, j) * b[i];
    double scale = 0.0;
    for (double v : atb) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, ata(i, i));
    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300) * static_cast<double>(n);

    std::vector<double> y(n, 0.0);
    std::vector<bool> passive(n, false);
    auto dual = [&]() {
        std::vector<double> w = atb;
        const std::vector<double> g = matvec(ata, y);
        for (std::size_t j = 0; j < n; ++j) w[j] -= g[j];
        return w;
    };

    const int max_outer = static_cast<int>(3 * n + 10);
    for (int outer = 0; outer < max_outer; ++outer) {
        const std::vector<double> w = dual();
        std::size_t enter = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!passive[j] && w[j] > tol && (enter == n || w[j] > w[enter])) enter = j;
        if (enter == n) break;
        passive[enter] = true;

        for (int inner = 0; inner < static_cast<int>(n) + 1; ++inner) {
            std::vector<std::size_t> pset;
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j]) pset.push_back(j);
            const std::vector<double> z = passive_least_squares(ata, atb, pset);
            bool feasible = true;
            for (double zi : z)
                if (zi <= 0.0) feasible = false;
            if (feasible) {
                std::fill(y.begin(), y.end(), 0.0);
                for (std::size_t k = 0; k < pset.size(); ++k) y[pset[k]] = z[k];
                break;
            }
            // move toward z until the first passive variable hits zero
            double alpha = 1.0;
            for (std::size_t k = 0; k < pset.size(); ++k) {
                if (z[k] <= 0.0) {
                    const double yk = y[pset[k]];
                    alpha = std::min(alpha, yk / (yk - z[k]));
                }
            }
            double ymax = 0.0;
            for (std::size_t k = 0; k < pset.size(); ++k) {
                const std::size_t j = pset[k];
                y[j] += alpha * (z[k] - y[j]);
                ymax = std::max(ymax, std::abs(y[j]));
            }
            for (std::size_t k = 0; k < pset.size(); ++k) {
                const std::size_t j = pset[k];
                if (y[j] <= 1e-14 * ymax) {
                    y[j] = 0.0;
                    passive[j] = false;
                }
            }
            bool any = false;
            for (std::size_t j = 0; j < n; ++j) any = any || passive[j];
            if (!any) break;
        }
    }

    VectorNnlsResult out{y, 0.0};
    const std::vector<double> ay = matvec(a, y);
    double ss = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) ss += (ay[i] - b[i]) * (ay[i] - b[i]);
    out.residual_norm = std::sqrt(ss);
    return out;
}

void RandSpaConfig::validate(std::size_t m) const {
    if (rank == 0) throw Error(ErrorKind::InvalidInput, "rank must be positive");
    if (nu == 0 || nu > m) throw Error(ErrorKind::InvalidInput, "nu must satisfy 1 <= nu <= m");
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw Error(ErrorKind::InvalidInput, "kappa must be a finite value >= 1");
    if (runs == 0) throw Error(ErrorKind::InvalidInput, "runs must be positive");
}

SelectionResult spa_select(const Matrix& x, std::size_t r, const std::optional<Matrix>& q) {
    if (x.empty()) throw Error(ErrorKind::InvalidInput, "X is empty");
    return finish_with_nnls(x, select_columns_greedy(x, r, [&](std::size_t) { return q; }));
}

Matrix gen_random_q(std::size_t m, const RandSpaConfig& config, std::size_t run_index, std::size_t step) {
    config.validate(m);
    Rng rng(config.seed, "randspa-q", (static_cast<std::uint64_t>(run_index) << 32) | static_cast<std::uint64_t>(step));
    Matrix q;
    // a Gaussian draw is rank deficient with probability zero; redraw if it happens numerically
    for (int attempt = 0;; ++attempt) {
        try {
            q = orthonormal_basis(rng.normal_matrix(m, config.nu));
            break;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RankDeficient || attempt >= 8) throw;
        }
    }
    const double tail = 1.0 / std::sqrt(config.kappa);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 1; j < config.nu; ++j) q(i, j) *= tail;
    return q;
}

SelectionResult randspa(const Matrix& x, const RandSpaConfig& config) {
    if (x.empty()) throw Error(ErrorKind::InvalidInput, "X is empty");
    config.validate(x.rows());
    const std::size_t m = x.rows();
    std::optional<SelectionResult> best;
    for (std::size_t run = 0; run < config.runs; ++run) {
        // QQᵀ = I exactly when ν = m and κ = 1, so the plain criterion is used
        auto q_for_step = [&](std::size_t step) -> std::optional<Matrix> {
            if (is_plain_spa(config, m)) return std::nullopt;
            return gen_random_q(m, config, run, step);
        };
        SelectionResult cur = finish_with_nnls(x, select_columns_greedy(x, config.rank, q_for_step));
        if (!best || cur.relative_error < best->relative_error) best = std::move(cur);
        if (is_plain_spa(config, m)) break;
    }
    return std::move(*best);
}

}  // namespace volmf
