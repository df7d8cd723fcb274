#include "volmf/maxvol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "volmf/error.hpp"
#include "volmf/linalg.hpp"
#include "volmf/projections.hpp"
#include "volmf/rng.hpp"

namespace volmf {

namespace {

Matrix residual(const Matrix& w, const Matrix& h, const Matrix& x) {
    Matrix r = matmul(w, h);
    r -= x;
    return r;
}

double column_sum_error(const Matrix& h) {
    double worst = 0.0;
    for (double s : column_sums(h)) worst = std::max(worst, std::abs(s - 1.0));
    return worst;
}

std::vector<double> row_norms(const Matrix& h) {
    std::vector<double> s(h.rows());
    for (std::size_t i = 0; i < h.rows(); ++i) s[i] = norm2(h.row(i));
    return s;
}

// H̃ = S⁻¹H; throws ZeroRow when a row is numerically zero.
Matrix normalize_rows(const Matrix& h, std::vector<double>& norms) {
    norms = row_norms(h);
    const double floor = 1e-12 * frobenius_norm(h);
    Matrix out = h;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        if (!(norms[i] > floor) || norms[i] == 0.0) {
            throw Error(ErrorKind::ZeroRow, "row " + std::to_string(i) + " of H is zero");
        }
        for (double& v : out.row(i)) v /= norms[i];
    }
    return out;
}

Matrix shifted_gram_inverse(const Matrix& h, double delta) {
    Matrix g = outer_gram(h);
    add_to_diagonal(g, delta);
    return spd_inverse(g);
}

using GradFn = std::function<Matrix(const Matrix&)>;
using ProjFn = std::function<void(Matrix&)>;

// Adaptive accelerated gradient state for one block.
class AdaptiveBlock {
public:
    AdaptiveBlock(Matrix x0, double lipschitz0, const GradFn& grad, const ProjFn& proj) {
        gamma_o_ = 1.0 / lipschitz0;
        Gamma_o_ = lipschitz0;
        x_o_ = x0;
        xbar_o_ = x0;
        Matrix g0 = grad(x0);
        Matrix x1 = x0;
        axpy(-1e-6, g0, x1);
        proj(x1);
        x_ = x1;
        xbar_ = std::move(x1);
    }

    const Matrix& x() const noexcept { return x_; }

    // Refresh ∇f(x̄_o) after the other block changed.
    void refresh(const GradFn& grad) { grad_bar_o_ = grad(xbar_o_); }

    // One step; returns false when a step denominator vanished.
    bool step(const GradFn& grad, const ProjFn& proj) {
        Matrix g = grad(xbar_);
        const double dx = frobenius_norm(xbar_ - xbar_o_);
        const double dg = frobenius_norm(g - grad_bar_o_);
        bool ok = true;
        double gamma, Gamma;
        if (dx > 0.0 && dg > 0.0) {
            gamma = std::min(gamma_o_ * std::sqrt(1.0 + theta_ / 2.0), dx / (2.0 * dg));
            Gamma = std::min(Gamma_o_ * std::sqrt(1.0 + Theta_ / 2.0), dg / (2.0 * dx));
        } else {
            gamma = gamma_o_;
            Gamma = Gamma_o_;
            ok = false;
        }
        Matrix x_new = xbar_;
        axpy(-gamma, g, x_new);
        proj(x_new);
        theta_ = gamma / gamma_o_;
        Theta_ = Gamma / Gamma_o_;
        xbar_o_ = std::move(xbar_);
        grad_bar_o_ = std::move(g);
        const double root = std::sqrt(gamma * Gamma);
        const double coef = std::max(0.0, (1.0 - root) / (1.0 + root));
        xbar_ = extrapolate(x_new, x_o_, coef);
        x_o_ = x_new;
        x_ = std::move(x_new);
        gamma_o_ = gamma;
        Gamma_o_ = Gamma;
        return ok;
    }

private:
    double gamma_o_ = 1.0;
    double Gamma_o_ = 1.0;
    double theta_ = 1e9;
    double Theta_ = 1e9;
    Matrix x_, x_o_, xbar_, xbar_o_, grad_bar_o_;
};

double norm_or_one(const Matrix& a) {
    const double l = spectral_norm(a);
    return l > 0.0 ? l : 1.0;
}

void check_problem(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts) {
    if (x.empty()) throw Error(ErrorKind::InvalidInput, "X is empty");
    opts.validate(x.rows(), x.cols());
    model.validate();
    if (min_entry(x) < 0.0) throw Error(ErrorKind::NegativeInput, "X must be nonnegative");
}

FactorPair checked_init(const Matrix& x, std::size_t r, std::uint64_t seed, bool simplex_h,
                        std::optional<FactorPair> init) {
    FactorPair f = init ? std::move(*init) : maxvol_random_init(x, r, seed, simplex_h);
    if (f.w.rows() != x.rows() || f.w.cols() != r || f.h.rows() != r || f.h.cols() != x.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "initial factors do not match X and rank");
    }
    project_nonneg_inplace(f.w);
    if (simplex_h) {
        project_simplex_columns_inplace(f.h);
    } else {
        project_nonneg_inplace(f.h);
    }
    return f;
}

TraceEntry make_entry(std::size_t it, double elapsed, const MaxvolTerms& t, double lambda) {
    TraceEntry e;
    e.iter = it;
    e.elapsed_s = elapsed;
    e.fit = t.fit;
    e.reg = t.logdet;
    e.lambda = lambda;
    e.reg_sign = -1.0;
    e.objective = t.objective;
    return e;
}

// Shared Adgrad2 driver; the H gradient and projection differ between the
// standard and normalized models.
FitResult adaptive_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts, FactorPair f) {
    const bool simplex_h = !model.normalized;
    FitResult result;
    Rng reseed_rng(opts.seed, "nmaxvol-reseed");
    const double xmax = std::max(max_entry(x), 1e-300);

    // zero rows of H are reseeded for the normalized model
    auto repair_rows = [&](Matrix& h) {
        bool changed = false;
        const double floor = 1e-12 * frobenius_norm(h);
        for (std::size_t i = 0; i < h.rows(); ++i) {
            const double nrm = norm2(h.row(i));
            if (nrm > floor && nrm > 0.0) continue;
            for (double& v : h.row(i)) v = reseed_rng.uniform(0.0, xmax);
            changed = true;
        }
        if (changed) result.status.zero_row_reseeded = true;
        return changed;
    };

    if (model.normalized) repair_rows(f.h);
    Matrix h_cur = f.h;
    Matrix w_cur = f.w;

    const GradFn grad_w = [&](const Matrix& w) { return maxvol_gradient_w(w, h_cur, x); };
    const GradFn grad_h = [&](const Matrix& h) {
        return model.normalized ? normalized_gradient_h(w_cur, h, x, model.lambda, model.delta)
                                : maxvol_gradient_h(w_cur, h, x, model.lambda, model.delta);
    };
    const ProjFn proj_w = [](Matrix& w) { project_nonneg_inplace(w); };
    const ProjFn proj_h = [&](Matrix& h) {
        if (simplex_h) {
            project_simplex_columns_inplace(h);
        } else {
            project_nonneg_inplace(h);
            repair_rows(h);
        }
    };

    try {
        result.initial_objective = maxvol_terms(x, f, model).objective;
        AdaptiveBlock wb(f.w, norm_or_one(outer_gram(f.h)), grad_w, proj_w);
        AdaptiveBlock hb(f.h, norm_or_one(gram(f.w)), grad_h, proj_h);
        w_cur = wb.x();
        h_cur = hb.x();
        FactorPair last_good{w_cur, h_cur};

        const Stopwatch clock;
        result.status.budget_exhausted = true;
        double prev_obj = result.initial_objective;
        for (std::size_t it = 1; it <= opts.outer; ++it) {
            wb.refresh(grad_w);
            for (std::size_t k = 0; k < opts.inner; ++k) {
                if (!wb.step(grad_w, proj_w)) result.status.zero_step_denominator = true;
            }
            w_cur = wb.x();
            hb.refresh(grad_h);
            for (std::size_t k = 0; k < opts.inner; ++k) {
                if (!hb.step(grad_h, proj_h)) result.status.zero_step_denominator = true;
                if (simplex_h) {
                    result.status.worst_column_sum_error =
                        std::max(result.status.worst_column_sum_error, column_sum_error(hb.x()));
                }
            }
            h_cur = hb.x();

            if (!w_cur.all_finite() || !h_cur.all_finite()) {
                result.status.nonfinite_guard = true;
                result.status.budget_exhausted = false;
                w_cur = last_good.w;
                h_cur = last_good.h;
                break;
            }
            const MaxvolTerms t = maxvol_terms(x, {w_cur, h_cur}, model);
            if (!std::isfinite(t.objective)) {
                result.status.nonfinite_guard = true;
                result.status.budget_exhausted = false;
                w_cur = last_good.w;
                h_cur = last_good.h;
                break;
            }
            result.trace.entries.push_back(make_entry(it, clock.seconds(), t, model.lambda));
            last_good = {w_cur, h_cur};
            if (opts.rel_tol > 0.0 &&
                std::abs(prev_obj - t.objective) <= opts.rel_tol * std::max(std::abs(t.objective), 1e-300)) {
                result.status.budget_exhausted = false;
                break;
            }
            prev_obj = t.objective;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotPositiveDefinite && e.kind() != ErrorKind::ZeroRow) throw;
        result.status.not_positive_definite = e.kind() == ErrorKind::NotPositiveDefinite;
        result.status.nonfinite_guard = e.kind() == ErrorKind::ZeroRow;
        result.status.budget_exhausted = false;
    }
    result.factors = {std::move(w_cur), std::move(h_cur)};
    return result;
}

}  // namespace

const char* to_string(MaxvolAlgorithm a) {
    switch (a) {
        case MaxvolAlgorithm::adgrad2: return "adgrad";
        case MaxvolAlgorithm::admm_bregman: return "admm";
        case MaxvolAlgorithm::admm_adgrad: return "admm-adgrad";
    }
    return "adgrad";
}

MaxvolAlgorithm parse_maxvol_algorithm(const std::string& s) {
    if (s == "adgrad" || s == "adgrad2") return MaxvolAlgorithm::adgrad2;
    if (s == "admm" || s == "admm-bregman" || s == "admm_bregman") return MaxvolAlgorithm::admm_bregman;
    if (s == "admm-adgrad" || s == "admm_adgrad") return MaxvolAlgorithm::admm_adgrad;
    throw Error(ErrorKind::InvalidInput, "unknown maxvol algorithm '" + s + "'");
}

void MaxvolModel::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidInput, "lambda must be nonnegative");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidInput, "delta must be nonnegative");
    if (normalized && !(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "normalized MaxVol needs delta > 0");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorKind::InvalidInput, "rho must be positive");
}

Matrix maxvol_gradient_w(const Matrix& w, const Matrix& h, const Matrix& x) {
    return matmul_nt(residual(w, h, x), h);
}

Matrix maxvol_gradient_h(const Matrix& w, const Matrix& h, const Matrix& x, double lambda, double delta) {
    Matrix g = matmul_tn(w, residual(w, h, x));
    if (lambda != 0.0) axpy(-2.0 * lambda, matmul(shifted_gram_inverse(h, delta), h), g);
    return g;
}

double normalized_logdet(const Matrix& h, double delta) {
    std::vector<double> norms;
    const Matrix ht = normalize_rows(h, norms);
    Matrix g = outer_gram(ht);
    add_to_diagonal(g, delta);
    return logdet_spd(g);
}

LogdetRange normalized_logdet_range(std::size_t r, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "range needs delta > 0");
    const double rr = static_cast<double>(r);
    return {std::log(1.0 + rr / delta) + rr * std::log(delta), rr * std::log(1.0 + delta)};
}

Matrix normalized_gradient_h(const Matrix& w, const Matrix& h, const Matrix& x, double lambda, double delta) {
    Matrix g = matmul_tn(w, residual(w, h, x));
    if (lambda == 0.0) return g;
    std::vector<double> norms;
    const Matrix ht = normalize_rows(h, norms);
    const Matrix gram_t = outer_gram(ht);
    Matrix shifted = gram_t;
    add_to_diagonal(shifted, delta);
    Matrix core = spd_inverse(shifted);
    const Matrix pg = matmul(core, gram_t);
    for (std::size_t i = 0; i < core.rows(); ++i) core(i, i) -= pg(i, i);
    Matrix term = matmul(core, ht);
    for (std::size_t i = 0; i < term.rows(); ++i)
        for (double& v : term.row(i)) v /= norms[i];
    axpy(-2.0 * lambda, term, g);
    return g;
}

MaxvolTerms maxvol_terms(const Matrix& x, const FactorPair& f, const MaxvolModel& model) {
    MaxvolTerms t;
    t.fit = 0.5 * frobenius_norm_sq(residual(f.w, f.h, x));
    if (model.normalized) {
        t.logdet = normalized_logdet(f.h, model.delta);
    } else {
        Matrix g = outer_gram(f.h);
        add_to_diagonal(g, model.delta);
        t.logdet = logdet_spd(g);
    }
    t.objective = t.fit - model.lambda * t.logdet;
    return t;
}

double phi_plus(double x, double gamma) {
    if (!(gamma >= 0.0)) throw Error(ErrorKind::InvalidInput, "phi_plus needs gamma >= 0");
    const double root = std::sqrt(x * x + 4.0 * gamma);
    if (x >= 0.0) return 0.5 * (root + x);
    const double den = root - x;
    return den > 0.0 ? 2.0 * gamma / den : 0.0;
}

Matrix y_update(const Matrix& h, const Matrix& dual, double rho, double lambda, double delta) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidInput, "rho must be positive");
    Matrix a = outer_gram(h);
    add_to_diagonal(a, delta);
    axpy(-1.0 / rho, dual, a);
    SymmetricEigen eig = sym_eig(symmetrize(a));
    for (double& d : eig.values) d = phi_plus(d, lambda / rho);
    Matrix y = symmetrize(reconstruct(eig));
    add_to_diagonal(y, -delta);
    return y;
}

BregmanStep bregman_fixed_point(const Matrix& q, double alpha_t, double sigma_t, double norm_sq_init, double eps,
                                int max_iter) {
    const std::size_t r = q.rows();
    const std::size_t n = q.cols();
    // columns of Q sorted once, descending
    std::vector<std::vector<double>> sorted(n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted[j] = q.column(j);
        std::sort(sorted[j].begin(), sorted[j].end(), std::greater<>());
    }
    auto build = [&](double s2, Matrix& out) {
        const double scale = alpha_t * s2 + sigma_t;
        for (std::size_t j = 0; j < n; ++j) {
            const double nu = simplex_threshold_sorted(sorted[j], scale);
            for (std::size_t i = 0; i < r; ++i) out(i, j) = std::max(q(i, j) - nu, 0.0) / scale;
        }
        return frobenius_norm_sq(out);
    };

    BregmanStep step{Matrix(r, n), 0, false};
    double s2 = norm_sq_init > 0.0 ? norm_sq_init : 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        const double next = build(s2, step.h);
        step.iterations = it;
        const double change = std::abs(s2 - next) / s2;
        s2 = next;
        if (change <= eps) {
            step.converged = true;
            break;
        }
    }
    // the returned H matches the last threshold pass
    return step;
}

BregmanStep bregman_h_update(const Matrix& w, const Matrix& x, const Matrix& h_k, const Matrix& y,
                             const Matrix& dual, double rho) {
    const double alpha_t = 6.0 * rho;
    Matrix wtw_dual = gram(w);
    axpy(-2.0, dual, wtw_dual);
    const double sigma_t = rho * 2.0 * spectral_norm(y) + spectral_norm(wtw_dual);

    // ∇u(H_k) = Wᵀ(WH_k − X) − 2ΛH_k + 2ρ(H_kH_kᵀ − Y)H_k
    Matrix grad = matmul_tn(w, residual(w, h_k, x));
    axpy(-2.0, matmul(dual, h_k), grad);
    Matrix coupling = outer_gram(h_k);
    coupling -= y;
    axpy(2.0 * rho, matmul(coupling, h_k), grad);

    const double hk2 = frobenius_norm_sq(h_k);
    Matrix q = h_k * (alpha_t * hk2 + sigma_t);
    q -= grad;
    return bregman_fixed_point(q, alpha_t, sigma_t, hk2);
}

FactorPair maxvol_random_init(const Matrix& x, std::size_t rank, std::uint64_t seed, bool simplex_h) {
    Rng rng(seed, "maxvol-init");
    const double xmax = std::max(max_entry(x), 1e-12);
    Matrix w = rng.uniform_matrix(x.rows(), rank, 0.0, xmax);
    Matrix h = rng.uniform_matrix(rank, x.cols());
    if (simplex_h) {
        const std::vector<double> sums = column_sums(h);
        for (std::size_t i = 0; i < rank; ++i)
            for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) /= sums[j] > 0.0 ? sums[j] : 1.0;
        project_simplex_columns_inplace(h);
    }
    return {std::move(w), std::move(h)};
}

FitResult adgrad2_fit(const Matrix& x, const MaxvolModel& model_in, const SolverOptions& opts,
                      std::optional<FactorPair> init) {
    MaxvolModel model = model_in;
    model.normalized = false;
    check_problem(x, model, opts);
    return adaptive_fit(x, model, opts, checked_init(x, opts.rank, opts.seed, true, std::move(init)));
}

FitResult nmaxvol_fit(const Matrix& x, const MaxvolModel& model_in, const SolverOptions& opts,
                      std::optional<FactorPair> init) {
    MaxvolModel model = model_in;
    model.normalized = true;
    check_problem(x, model, opts);
    return adaptive_fit(x, model, opts, checked_init(x, opts.rank, opts.seed, false, std::move(init)));
}

FitResult admm_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts,
                   std::optional<FactorPair> init) {
    check_problem(x, model, opts);
    if (model.normalized) throw Error(ErrorKind::InvalidInput, "ADMM supports the standard MaxVol model only");
    FactorPair f = checked_init(x, opts.rank, opts.seed, true, std::move(init));
    const bool bregman = model.algorithm != MaxvolAlgorithm::admm_adgrad;
    const double rho = model.rho;

    FitResult result;
    Matrix dual(opts.rank, opts.rank);
    Matrix y = outer_gram(f.h);
    Matrix w_old = f.w;
    Inertia inertia;
    FactorPair last_good = f;

    // ∇_H of ½‖X − WH‖² − ⟨HHᵀ, Λ⟩ + (ρ/2)‖Y − HHᵀ‖²
    const GradFn lagrangian_grad_h = [&](const Matrix& h) {
        Matrix g = matmul_tn(f.w, residual(f.w, h, x));
        axpy(-2.0, matmul(dual, h), g);
        Matrix coupling = outer_gram(h);
        coupling -= y;
        axpy(2.0 * rho, matmul(coupling, h), g);
        return g;
    };
    const ProjFn proj_h = [](Matrix& h) { project_simplex_columns_inplace(h); };
    std::optional<AdaptiveBlock> h_block;

    try {
        result.initial_objective = maxvol_terms(x, f, model).objective;
        if (!bregman) {
            h_block.emplace(f.h, norm_or_one(gram(f.w)), lagrangian_grad_h, proj_h);
            f.h = h_block->x();
        }
        const Stopwatch clock;
        result.status.budget_exhausted = true;
        double prev_obj = result.initial_objective;

        for (std::size_t it = 1; it <= opts.outer; ++it) {
            // W: inertial projected gradient on ½‖X − WH‖²
            const Matrix hht = outer_gram(f.h);
            const Matrix xht = matmul_nt(x, f.h);
            const double lw = norm_or_one(hht);
            for (std::size_t k = 0; k < opts.inner; ++k) {
                const double beta = inertia.next_beta(1.0);
                Matrix w_bar = extrapolate(f.w, w_old, beta);
                Matrix step = xht - matmul(w_bar, hht);
                w_old = std::move(f.w);
                f.w = std::move(w_bar);
                axpy(1.0 / lw, step, f.w);
                project_nonneg_inplace(f.w);
            }

            // H
            if (bregman) {
                for (std::size_t k = 0; k < opts.inner; ++k) {
                    BregmanStep s = bregman_h_update(f.w, x, f.h, y, dual, rho);
                    if (!s.converged) result.status.fixed_point_unconverged = true;
                    f.h = std::move(s.h);
                    result.status.worst_column_sum_error =
                        std::max(result.status.worst_column_sum_error, column_sum_error(f.h));
                }
            } else {
                h_block->refresh(lagrangian_grad_h);
                for (std::size_t k = 0; k < opts.inner; ++k) {
                    if (!h_block->step(lagrangian_grad_h, proj_h)) result.status.zero_step_denominator = true;
                    result.status.worst_column_sum_error =
                        std::max(result.status.worst_column_sum_error, column_sum_error(h_block->x()));
                }
                f.h = h_block->x();
            }

            // Y and the dual ascent
            y = y_update(f.h, dual, rho, model.lambda, model.delta);
            Matrix gap = y - outer_gram(f.h);
            axpy(rho, gap, dual);

            if (!f.w.all_finite() || !f.h.all_finite() || !y.all_finite()) {
                result.status.nonfinite_guard = true;
                result.status.budget_exhausted = false;
                f = last_good;
                break;
            }
            const MaxvolTerms t = maxvol_terms(x, f, model);
            TraceEntry e = make_entry(it, clock.seconds(), t, model.lambda);
            e.residual = frobenius_norm(gap);
            result.trace.entries.push_back(e);
            last_good = f;
            if (opts.rel_tol > 0.0 &&
                std::abs(prev_obj - t.objective) <= opts.rel_tol * std::max(std::abs(t.objective), 1e-300)) {
                result.status.budget_exhausted = false;
                break;
            }
            prev_obj = t.objective;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotPositiveDefinite && e.kind() != ErrorKind::ConvergenceFailure) throw;
        result.status.not_positive_definite = true;
        result.status.budget_exhausted = false;
        f = last_good;
    }
    result.factors = std::move(f);
    return result;
}

FitResult maxvol_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts,
                     std::optional<FactorPair> init) {
    if (model.normalized) return nmaxvol_fit(x, model, opts, std::move(init));
    if (model.algorithm == MaxvolAlgorithm::adgrad2) return adgrad2_fit(x, model, opts, std::move(init));
    return admm_fit(x, model, opts, std::move(init));
}

FitResult maxvol_best_of(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts, std::size_t starts) {
    if (starts == 0) throw Error(ErrorKind::InvalidInput, "starts must be positive");
    auto final_objective = [](const FitResult& f) {
        return f.trace.empty() ? f.initial_objective : f.trace.back().objective;
    };
    std::optional<FitResult> best;
    for (std::size_t s = 0; s < starts; ++s) {
        SolverOptions o = opts;
        o.seed = opts.seed + s;
        FitResult cur = maxvol_fit(x, model, o);
        if (!best || final_objective(cur) < final_objective(*best)) best = std::move(cur);
    }
    return std::move(*best);
}

}  // namespace volmf
