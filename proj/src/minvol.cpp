#include "volmf/minvol.hpp"

#include <algorithm>
#include <cmath>

#include "volmf/error.hpp"
#include "volmf/linalg.hpp"
#include "volmf/projections.hpp"
#include "volmf/rng.hpp"

namespace volmf {

namespace {

Matrix regularized_gram_inverse(const Matrix& w, double delta) {
    Matrix g = gram(w);
    add_to_diagonal(g, delta);
    return spd_inverse(g);
}

double norm_or_one(const Matrix& a) {
    const double l = spectral_norm(a);
    return l > 0.0 ? l : 1.0;
}

// ‖HHᵀ + λP‖ with P = (WᵀW + δI)⁻¹; P is returned through p_out when λ > 0.
double w_lipschitz(const Matrix& hht, const Matrix& w, double lambda, double delta, Matrix* p_out) {
    if (lambda == 0.0) return norm_or_one(hht);
    Matrix p = regularized_gram_inverse(w, delta);
    Matrix sum = hht;
    axpy(lambda, p, sum);
    const double l = norm_or_one(sum);
    if (p_out) *p_out = std::move(p);
    return l;
}

}  // namespace

const char* to_string(MinvolVariant v) {
    switch (v) {
        case MinvolVariant::minvol: return "minvol";
        case MinvolVariant::minvol_complete: return "minvol_complete";
        case MinvolVariant::new_minvol: return "new_minvol";
        case MinvolVariant::nmf_baseline: return "nmf";
    }
    return "minvol";
}

MinvolVariant parse_minvol_variant(const std::string& s) {
    if (s == "minvol") return MinvolVariant::minvol;
    if (s == "minvol_complete" || s == "minvol-complete") return MinvolVariant::minvol_complete;
    if (s == "new_minvol" || s == "new-minvol") return MinvolVariant::new_minvol;
    if (s == "nmf" || s == "nmf_baseline") return MinvolVariant::nmf_baseline;
    throw Error(ErrorKind::InvalidInput, "unknown minvol variant '" + s + "'");
}

void MinvolModel::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidInput, "delta must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidInput, "lambda must be nonnegative");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidInput, "gamma must be nonnegative");
    if (variant == MinvolVariant::new_minvol && !(gamma > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "new_minvol needs gamma > 0");
    }
}

MinvolTerms minvol_terms(const WeightedData& data, const FactorPair& f, const MinvolModel& model) {
    MinvolTerms t;
    t.fit = data.fit(f.w, f.h);
    Matrix g = gram(f.w);
    add_to_diagonal(g, model.delta);
    t.half_logdet = 0.5 * logdet_spd(g);
    t.h_penalty = 0.5 * model.effective_gamma() * frobenius_norm_sq(f.h);
    t.objective = t.fit + model.effective_lambda() * t.half_logdet + t.h_penalty;
    return t;
}

Matrix minvol_grad_w(const WeightedData& data, const Matrix& w_bar, const Matrix& h, const MinvolModel& model) {
    Matrix grad = data.grad_w(w_bar, h);
    const double lambda = model.effective_lambda();
    if (lambda > 0.0) axpy(lambda, matmul(w_bar, regularized_gram_inverse(w_bar, model.delta)), grad);
    return grad;
}

MinvolModel init_hyperparams(const WeightedData& data, const FactorPair& f0, MinvolModel model, bool* zero_logdet) {
    const double fit_sq = std::max(2.0 * data.fit(f0.w, f0.h), 1e-6);
    Matrix g = gram(f0.w);
    add_to_diagonal(g, model.delta);
    const double ld = std::abs(logdet_spd(g));
    const bool degenerate = ld < 1e-14;
    if (zero_logdet) *zero_logdet = degenerate;
    if (model.variant != MinvolVariant::nmf_baseline) model.lambda = degenerate ? 1.0 : fit_sq / ld;
    if (model.variant == MinvolVariant::new_minvol) {
        const double hn = frobenius_norm_sq(f0.h);
        if (hn > 0.0) model.gamma = 0.01 * fit_sq / hn;
    }
    return model;
}

MinvolModel autotune_step(const ConvergenceTrace& trace, const MinvolModel& model, const WeightedData& data,
                          const FactorPair& current) {
    if (trace.entries.size() < 2) return model;
    const double cur = trace.entries[trace.entries.size() - 1].objective;
    const double prev = trace.entries[trace.entries.size() - 2].objective;
    if (std::abs(cur - prev) / data.data_norm_sq() >= kAutotuneThreshold) return model;
    return init_hyperparams(data, current, model);
}

FactorPair minvol_random_init(const WeightedData& data, std::size_t rank, std::uint64_t seed) {
    Rng rng(seed, "minvol-init");
    Matrix w = rng.uniform_matrix(data.rows(), rank);
    project_simplex_columns_inplace(w);
    Matrix h = rng.uniform_matrix(rank, data.cols());
    // best scalar s for min ‖P_Ω(X − sWH)‖
    const Matrix zero_h(rank, data.cols());
    const double xx = 2.0 * data.fit(w, zero_h);
    const double rr = 2.0 * data.fit(w, h);
    // ‖P_Ω(WH)‖² via the identity ‖a − b‖² = ‖a‖² − 2⟨a,b⟩ + ‖b‖² at two scales
    const double rr2 = 2.0 * data.fit(w, 2.0 * h);
    const double bb = 0.5 * (rr2 - 2.0 * rr + xx);
    const double ab = 0.5 * (xx + bb - rr);
    if (bb > 0.0 && ab > 0.0) h *= ab / bb;
    return {std::move(w), std::move(h)};
}

FactorPair warm_start_nmf(const WeightedData& data, std::size_t rank, std::size_t iters, std::uint64_t seed,
                          std::size_t inner) {
    MinvolModel model;
    model.variant = MinvolVariant::minvol;
    model.lambda = 0.0;
    SolverOptions opts;
    opts.rank = rank;
    opts.outer = iters;
    opts.inner = inner;
    opts.seed = seed;
    return minvol_fit(data, model, opts).factors;
}

FitResult minvol_fit(const WeightedData& data, const MinvolModel& model_in, const SolverOptions& opts,
                     std::optional<FactorPair> init) {
    opts.validate(data.rows(), data.cols());
    model_in.validate();
    MinvolModel model = model_in;

    FactorPair f = init ? std::move(*init) : minvol_random_init(data, opts.rank, opts.seed);
    if (f.w.rows() != data.rows() || f.w.cols() != opts.rank || f.h.rows() != opts.rank || f.h.cols() != data.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "initial factors do not match X and rank");
    }
    if (model.simplex_w()) {
        project_simplex_columns_inplace(f.w);
    } else {
        project_nonneg_inplace(f.w);
    }
    project_nonneg_inplace(f.h);

    FitResult result;
    FactorPair last_good = f;
    Matrix w_old = f.w;
    Matrix h_old = f.h;
    Inertia inertia_w, inertia_h;

    double lambda = model.effective_lambda();
    double gamma = model.effective_gamma();
    const double delta = model.delta;

    double lw_prev, lh_prev;
    try {
        lw_prev = w_lipschitz(outer_gram(f.h), f.w, lambda, delta, nullptr);
        lh_prev = norm_or_one(gram(f.w)) + gamma;
        result.initial_objective = minvol_terms(data, f, model).objective;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotPositiveDefinite) throw;
        result.status.not_positive_definite = true;
        result.factors = std::move(f);
        return result;
    }

    const Stopwatch clock;
    result.status.budget_exhausted = true;
    double prev_obj = result.initial_objective;

    for (std::size_t it = 1; it <= opts.outer; ++it) {
        try {
            // W block
            const Matrix hht = outer_gram(f.h);
            const Matrix xht = data.full() ? matmul_nt(data.x(), f.h) : Matrix();
            for (std::size_t k = 0; k < opts.inner; ++k) {
                const double l_cur = w_lipschitz(hht, f.w, lambda, delta, nullptr);
                const double beta = inertia_w.next_beta(0.9999 * std::sqrt(lw_prev / l_cur));
                Matrix w_bar = extrapolate(f.w, w_old, beta);
                Matrix p_bar;
                const double l_bar = w_lipschitz(hht, w_bar, lambda, delta, &p_bar);
                Matrix grad = data.full() ? matmul(w_bar, hht) - xht : data.grad_w(w_bar, f.h);
                if (lambda > 0.0) axpy(lambda, matmul(w_bar, p_bar), grad);
                w_old = std::move(f.w);
                f.w = std::move(w_bar);
                axpy(-1.0 / l_bar, grad, f.w);
                if (model.simplex_w()) {
                    project_simplex_columns_inplace(f.w);
                } else {
                    project_nonneg_inplace(f.w);
                }
                lw_prev = l_bar;
            }

            // H block
            const Matrix wtw = gram(f.w);
            const double lh = norm_or_one(wtw) + gamma;
            const Matrix wtx = data.full() ? matmul_tn(f.w, data.x()) : Matrix();
            const double shrink = (lh - gamma) / lh;
            for (std::size_t k = 0; k < opts.inner; ++k) {
                const double beta = inertia_h.next_beta(0.9999 * std::sqrt(lh_prev / lh));
                Matrix h_bar = extrapolate(f.h, h_old, beta);
                Matrix grad = data.full() ? matmul(wtw, h_bar) - wtx : data.grad_h(f.w, h_bar);
                h_old = std::move(f.h);
                f.h = std::move(h_bar);
                if (gamma > 0.0) f.h *= shrink;
                axpy(-1.0 / lh, grad, f.h);
                project_nonneg_inplace(f.h);
                lh_prev = lh;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotPositiveDefinite) throw;
            result.status.not_positive_definite = true;
            f = last_good;
            result.status.budget_exhausted = false;
            break;
        }

        if (!f.w.all_finite() || !f.h.all_finite()) {
            result.status.nonfinite_guard = true;
            f = last_good;
            result.status.budget_exhausted = false;
            break;
        }

        const MinvolTerms t = minvol_terms(data, f, model);
        TraceEntry e;
        e.iter = it;
        e.elapsed_s = clock.seconds();
        e.fit = t.fit;
        e.reg = t.half_logdet;
        e.lambda = lambda;
        e.extra = t.h_penalty;
        e.objective = t.objective;
        result.trace.entries.push_back(e);
        last_good = f;

        if (opts.rel_tol > 0.0 &&
            std::abs(prev_obj - t.objective) <= opts.rel_tol * std::max(std::abs(t.objective), 1e-300)) {
            result.status.budget_exhausted = false;
            break;
        }
        prev_obj = t.objective;

        if (model.autotune && model.variant != MinvolVariant::nmf_baseline) {
            model = autotune_step(result.trace, model, data, f);
            lambda = model.effective_lambda();
            gamma = model.effective_gamma();
        }
    }

    result.factors = std::move(f);
    return result;
}

}  // namespace volmf
