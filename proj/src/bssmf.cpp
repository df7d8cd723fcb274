#include "volmf/bssmf.hpp"

#include <algorithm>
#include <cmath>

#include "volmf/error.hpp"
#include "volmf/linalg.hpp"
#include "volmf/rng.hpp"
#include "volmf/weighted_data.hpp"

namespace volmf {

namespace {

double safe_norm(const Matrix& gram_like) {
    const double l = spectral_norm(gram_like);
    return l > 0.0 ? l : 1.0;
}

bool data_within_bounds(const WeightedData& data, const Bounds& b) {
    const auto lo = data.row_min();
    const auto hi = data.row_max();
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] < b.lower[i] || hi[i] > b.upper[i]) return false;
    return true;
}

}  // namespace

Bounds BssmfProblem::auto_bounds(const Matrix& x, const Matrix* mask) {
    const WeightedData data(x, mask);
    Bounds b{data.row_min(), data.row_max()};
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!std::isfinite(b.lower[i])) {
            throw Error(ErrorKind::InvalidBounds, "row " + std::to_string(i) + " has no observed entry");
        }
    }
    return b;
}

CenteredData center_data(const Matrix& x, Centering mode, const Matrix* mask) {
    CenteredData out{x, std::vector<double>(x.rows(), 0.0)};
    if (mode == Centering::none) return out;
    const WeightedData data(x, mask);
    if (mode == Centering::global) {
        std::fill(out.mu.begin(), out.mu.end(), data.global_mean());
    } else {
        out.mu = data.row_means();
    }
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (double& v : out.xc.row(i)) v -= out.mu[i];
    return out;
}

Matrix uncenter_w(const Matrix& wc, const std::vector<double>& mu) {
    if (mu.size() != wc.rows()) throw Error(ErrorKind::DimensionMismatch, "mu length must equal rows of W");
    Matrix w = wc;
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (double& v : w.row(i)) v += mu[i];
    return w;
}

Matrix normalize_to_unit_box(const Matrix& x, const Bounds& bounds) {
    bounds.validate();
    if (bounds.size() != x.rows()) throw Error(ErrorKind::DimensionMismatch, "bounds length must equal rows of X");
    Matrix out = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double a = bounds.lower[i];
        const double span = bounds.upper[i] - a;
        if (!(span > 0.0) || !std::isfinite(span)) {
            throw Error(ErrorKind::DegenerateRow, "row " + std::to_string(i) + " has a_i = b_i or unbounded range");
        }
        for (double& v : out.row(i)) v = (v - a) / span;
    }
    return out;
}

Matrix denormalize_from_unit_box(const Matrix& xn, const Bounds& bounds) {
    bounds.validate();
    if (bounds.size() != xn.rows()) throw Error(ErrorKind::DimensionMismatch, "bounds length must equal rows of X");
    Matrix out = xn;
    for (std::size_t i = 0; i < xn.rows(); ++i) {
        const double a = bounds.lower[i];
        const double span = bounds.upper[i] - a;
        for (double& v : out.row(i)) v = a + v * span;
    }
    return out;
}

FactorPair bssmf_init(const Bounds& bounds, std::size_t n, std::size_t rank, std::uint64_t seed) {
    bounds.validate();
    Rng rng(seed, "bssmf-init");
    Matrix w(bounds.size(), rank);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const double a = bounds.lower[i];
        const double b = bounds.upper[i];
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw Error(ErrorKind::InvalidBounds, "random initialization needs finite bounds");
        }
        for (double& v : w.row(i)) v = rng.uniform(a, b);
    }
    Matrix h = rng.uniform_matrix(rank, n);
    project_simplex_columns_inplace(h);
    return {std::move(w), std::move(h)};
}

FitResult bssmf_fit(const BssmfProblem& problem, const SolverOptions& opts) {
    opts.validate(problem.x.rows(), problem.x.cols());
    return bssmf_fit(problem, opts, bssmf_init(problem.bounds, problem.x.cols(), opts.rank, opts.seed));
}

FitResult bssmf_fit(const BssmfProblem& problem, const SolverOptions& opts, FactorPair init) {
    const Matrix& x = problem.x;
    opts.validate(x.rows(), x.cols());
    problem.bounds.validate();
    if (problem.bounds.size() != x.rows()) throw Error(ErrorKind::DimensionMismatch, "bounds length must equal rows of X");
    if (init.w.rows() != x.rows() || init.w.cols() != opts.rank || init.h.rows() != opts.rank ||
        init.h.cols() != x.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "initial factors do not match X and rank");
    }
    const Matrix* mask = problem.mask ? &*problem.mask : nullptr;

    // fit the translated problem: Xc = X − μeᵀ, Wc ∈ [a − μ, b − μ]
    const CenteredData centered = center_data(x, problem.centering, mask);
    const WeightedData data(centered.xc, mask);
    Bounds shifted = problem.bounds;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
        shifted.lower[i] -= centered.mu[i];
        shifted.upper[i] -= centered.mu[i];
    }

    FitResult result;
    result.status.bounds_violate_data = !data_within_bounds(data, shifted);

    std::vector<double> neg_mu = centered.mu;
    for (double& v : neg_mu) v = -v;
    Matrix w = uncenter_w(init.w, neg_mu);
    project_box_columns_inplace(w, shifted);
    Matrix h = project_simplex_columns(init.h);

    Matrix w_old = w;
    Matrix h_old = h;
    Inertia inertia_w, inertia_h;
    double lw = safe_norm(outer_gram(h));
    double lh = safe_norm(gram(w));
    double lw_prev = lw;
    double lh_prev = lh;

    result.initial_objective = data.fit(w, h);
    double prev_obj = result.initial_objective;
    const Stopwatch clock;
    result.status.budget_exhausted = true;

    for (std::size_t it = 1; it <= opts.outer; ++it) {
        // W block
        Matrix xht, hht;
        if (data.full()) {
            xht = matmul_nt(data.x(), h);
            hht = outer_gram(h);
        }
        for (std::size_t k = 0; k < opts.inner; ++k) {
            const double beta = inertia_w.next_beta(0.9999 * std::sqrt(lw_prev / lw));
            Matrix w_bar = extrapolate(w, w_old, beta);
            Matrix grad = data.full() ? matmul(w_bar, hht) - xht : data.grad_w(w_bar, h);
            w_old = std::move(w);
            w = std::move(w_bar);
            axpy(-1.0 / lw, grad, w);
            project_box_columns_inplace(w, shifted);
            lw_prev = lw;
        }
        lh = safe_norm(gram(w));

        // H block
        const Matrix wtw = data.full() ? gram(w) : Matrix();
        const Matrix wtx = data.full() ? matmul_tn(w, data.x()) : Matrix();
        for (std::size_t k = 0; k < opts.inner; ++k) {
            const double beta = inertia_h.next_beta(0.9999 * std::sqrt(lh_prev / lh));
            Matrix h_bar = extrapolate(h, h_old, beta);
            Matrix grad = data.full() ? matmul(wtw, h_bar) - wtx : data.grad_h(w, h_bar);
            h_old = std::move(h);
            h = std::move(h_bar);
            axpy(-1.0 / lh, grad, h);
            project_simplex_columns_inplace(h);
            lh_prev = lh;
        }
        lw = safe_norm(outer_gram(h));

        if (!w.all_finite() || !h.all_finite()) {
            result.status.nonfinite_guard = true;
            w = w_old;
            h = h_old;
            result.status.budget_exhausted = false;
            break;
        }

        const double obj = data.fit(w, h);
        TraceEntry e;
        e.iter = it;
        e.elapsed_s = clock.seconds();
        e.fit = obj;
        e.objective = obj;
        result.trace.entries.push_back(e);
        if (opts.rel_tol > 0.0 && std::abs(prev_obj - obj) <= opts.rel_tol * std::max(std::abs(obj), 1e-300)) {
            result.status.budget_exhausted = false;
            break;
        }
        prev_obj = obj;
    }

    result.factors = {uncenter_w(w, centered.mu), std::move(h)};
    return result;
}

FitResult bssmf_best_of(const BssmfProblem& problem, const SolverOptions& opts, std::size_t starts) {
    if (starts == 0) throw Error(ErrorKind::InvalidInput, "starts must be positive");
    std::optional<FitResult> best;
    for (std::size_t s = 0; s < starts; ++s) {
        SolverOptions o = opts;
        o.seed = opts.seed + s;
        FitResult cur = bssmf_fit(problem, o);
        const double obj = cur.trace.empty() ? cur.initial_objective : cur.trace.back().objective;
        const double best_obj = !best ? 0.0 : (best->trace.empty() ? best->initial_objective : best->trace.back().objective);
        if (!best || obj < best_obj) best = std::move(cur);
    }
    return std::move(*best);
}

}  // namespace volmf
