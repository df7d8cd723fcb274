#include "volmf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "volmf/error.hpp"
#include "volmf/linalg.hpp"
#include "volmf/rng.hpp"

namespace volmf {

namespace {

double rmse(const Matrix& a, const Matrix& b) {
    return std::sqrt(frobenius_norm_sq(a - b) / static_cast<double>(a.size()));
}

Matrix add_clipped_noise(const Matrix& clean, const Matrix& noise, double scale) {
    Matrix out = clean;
    auto od = out.data();
    auto nd = noise.data();
    for (std::size_t k = 0; k < od.size(); ++k) od[k] = std::max(0.0, od[k] + scale * nd[k]);
    return out;
}

std::vector<double> dirichlet(Rng& rng, std::size_t r, double alpha) {
    std::vector<double> v(r);
    double s = 0.0;
    for (double& x : v) s += (x = rng.gamma(alpha));
    if (s == 0.0) {
        v.assign(r, 0.0);
        v[rng.below(r)] = 1.0;
        return v;
    }
    for (double& x : v) x /= s;
    return v;
}

bool rows_and_cols_observed(const Matrix& mask) {
    std::vector<bool> col(mask.cols(), false);
    for (std::size_t i = 0; i < mask.rows(); ++i) {
        bool any = false;
        for (std::size_t j = 0; j < mask.cols(); ++j)
            if (mask(i, j) != 0.0) any = col[j] = true;
        if (!any) return false;
    }
    return std::all_of(col.begin(), col.end(), [](bool b) { return b; });
}

}  // namespace

void SyntheticSpec::validate() const {
    if (m == 0 || n == 0 || r == 0) throw Error(ErrorKind::InvalidInput, "m, n, r must be positive");
    if (!(h_zero_fraction >= 0.0 && h_zero_fraction < 1.0)) {
        throw Error(ErrorKind::InvalidInput, "h_zero_fraction must lie in [0,1)");
    }
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
        throw Error(ErrorKind::InvalidInput, "missing_fraction must lie in [0,1)");
    }
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) {
        throw Error(ErrorKind::InvalidInput, "noise_level must be nonnegative");
    }
    if (!(dirichlet_alpha >= 0.0)) throw Error(ErrorKind::InvalidInput, "dirichlet_alpha must be nonnegative");
}

CompletionInstance gen_completion_instance(const SyntheticSpec& spec) {
    spec.validate();
    CompletionInstance inst;
    Rng rng_w(spec.seed, "completion-w");
    inst.w_true = rng_w.uniform_matrix(spec.m, spec.r);

    Rng rng_h(spec.seed, "completion-h");
    if (spec.dirichlet_alpha > 0.0) {
        inst.h_true = Matrix(spec.r, spec.n);
        for (std::size_t j = 0; j < spec.n; ++j) inst.h_true.set_column(j, dirichlet(rng_h, spec.r, spec.dirichlet_alpha));
    } else {
        inst.h_true = rng_h.uniform_matrix(spec.r, spec.n);
        const std::size_t total = spec.r * spec.n;
        const auto zeros = static_cast<std::size_t>(std::llround(spec.h_zero_fraction * static_cast<double>(total)));
        std::vector<std::size_t> order(total);
        std::iota(order.begin(), order.end(), 0);
        rng_h.shuffle(order);
        for (std::size_t k = 0; k < zeros; ++k) inst.h_true.data()[order[k]] = 0.0;
    }

    inst.x_clean = matmul(inst.w_true, inst.h_true);
    if (spec.normalize_mean_to_one) {
        const double mean = std::accumulate(inst.x_clean.data().begin(), inst.x_clean.data().end(), 0.0) /
                            static_cast<double>(inst.x_clean.size());
        if (!(mean > 0.0)) throw Error(ErrorKind::ZeroDataNorm, "generated X has zero mean");
        inst.h_true *= 1.0 / mean;
        inst.x_clean *= 1.0 / mean;
    }

    if (spec.noise_level == 0.0) {
        inst.x_noisy = inst.x_clean;
    } else {
        Rng rng_n(spec.seed, "completion-noise");
        const Matrix noise = rng_n.uniform_matrix(spec.m, spec.n, -1.0, 1.0);
        // RMSE grows monotonically with the scale even after clipping
        double lo = 0.0;
        double hi = spec.noise_level * std::sqrt(3.0);
        while (rmse(inst.x_clean, add_clipped_noise(inst.x_clean, noise, hi)) < spec.noise_level) hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rmse(inst.x_clean, add_clipped_noise(inst.x_clean, noise, mid)) < spec.noise_level ? lo : hi) = mid;
        }
        inst.x_noisy = add_clipped_noise(inst.x_clean, noise, hi);
    }

    const std::size_t total = spec.m * spec.n;
    const auto hidden = static_cast<std::size_t>(std::llround(spec.missing_fraction * static_cast<double>(total)));
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 100) throw Error(ErrorKind::MaskResampleExhausted, "could not observe every row and column");
        Rng rng_m(spec.seed, "completion-mask", attempt);
        std::vector<std::size_t> order(total);
        std::iota(order.begin(), order.end(), 0);
        rng_m.shuffle(order);
        inst.mask = Matrix(spec.m, spec.n, 1.0);
        for (std::size_t k = 0; k < hidden; ++k) inst.mask.data()[order[k]] = 0.0;
        if (rows_and_cols_observed(inst.mask)) break;
    }
    return inst;
}

SeparableInstance gen_separable_instance(std::size_t m, std::size_t n, std::size_t r, double noise,
                                         std::uint64_t seed) {
    if (r == 0 || n < r || m < r) throw Error(ErrorKind::InvalidInput, "separable instance needs r <= min(m, n)");
    if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidInput, "noise must be nonnegative");
    SeparableInstance inst;
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng_w(seed, "separable-w", attempt);
        inst.w = rng_w.uniform_matrix(m, r);
        try {
            (void)orthonormal_basis(inst.w);
            break;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RankDeficient || attempt >= 100) throw;
        }
    }

    Rng rng_h(seed, "separable-h");
    Matrix ordered(r, n);
    for (std::size_t k = 0; k < r; ++k) ordered(k, k) = 1.0;
    for (std::size_t j = r; j < n; ++j) ordered.set_column(j, dirichlet(rng_h, r, 1.0));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng_h.shuffle(perm);
    // column perm[j] of H is column j of the ordered block
    inst.h = Matrix(r, n);
    for (std::size_t j = 0; j < n; ++j) inst.h.set_column(perm[j], ordered.column(j));
    inst.true_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(r));

    inst.x = matmul(inst.w, inst.h);
    if (noise > 0.0) {
        Rng rng_n(seed, "separable-noise");
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> e(m);
            for (double& v : e) v = rng_n.normal();
            const double ne = norm2(e);
            const double target = noise * rng_n.uniform();
            for (std::size_t i = 0; i < m; ++i) inst.x(i, j) += ne > 0.0 ? e[i] * target / ne : 0.0;
        }
    }
    return inst;
}

Matrix fixture(const std::string& name) {
    if (name == "example1_X") {
        return Matrix{{11, 9, 6, 2, 3, 9}, {9, 11, 9, 3, 2, 6}, {3, 9, 11, 9, 6, 2},
                      {2, 6, 9, 11, 9, 3}, {6, 2, 3, 9, 11, 9}, {9, 3, 2, 6, 9, 11}};
    }
    if (name == "example1_W") {
        return Matrix{{2, 3, 0}, {3, 2, 0}, {3, 0, 2}, {2, 0, 3}, {0, 2, 3}, {0, 3, 2}};
    }
    if (name == "example1_H") {
        return Matrix{{1, 3, 3, 1, 0, 0}, {3, 1, 0, 0, 1, 3}, {0, 0, 1, 3, 3, 1}};
    }
    if (name == "example1_W_alt") {
        return Matrix{{0, 3, 1}, {1, 3, 0}, {3, 1, 0}, {3, 0, 1}, {1, 0, 3}, {0, 1, 3}};
    }
    if (name == "example1_H_alt") {
        return Matrix{{0, 2, 3, 3, 2, 0}, {3, 3, 2, 0, 0, 2}, {2, 0, 0, 2, 3, 3}};
    }
    if (name == "tightness_X") {
        return Matrix{{0.25, 0.25, 0.75, 0.75}, {0.2, 0.6, 0.6, 0.2}, {0.75, 0.75, 0.25, 0.25}, {0.8, 0.4, 0.4, 0.8}};
    }
    if (name == "tightness_W") {
        return Matrix{{0, 0.5, 1}, {0.2, 1, 0.2}, {1, 0.5, 0}, {0.8, 0, 0.8}};
    }
    if (name == "tightness_H") {
        return Matrix{{0.75, 0.5, 0, 0.25}, {0, 0.5, 0.5, 0}, {0.25, 0, 0.5, 0.75}};
    }
    if (name == "pmf_H_boundary") {
        Matrix h{{1, 2, 2, 1, 0, 0}, {2, 1, 0, 0, 1, 2}, {0, 0, 1, 2, 2, 1}};
        h *= 1.0 / 3.0;
        return h;
    }
    throw Error(ErrorKind::UnknownFixture, "unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() {
    return {"example1_X", "example1_W", "example1_H", "example1_W_alt", "example1_H_alt",
            "tightness_X", "tightness_W", "tightness_H", "pmf_H_boundary"};
}

}  // namespace volmf
