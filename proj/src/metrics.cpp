#include "volmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "volmf/error.hpp"
#include "volmf/linalg.hpp"

namespace volmf {

double relative_error(const Matrix& x, const Matrix& w, const Matrix& h, const Matrix* mask) {
    if (w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "relative_error: factor shapes do not conform to X");
    }
    if (mask) require_same_shape(x, *mask, "relative_error mask");
    const Matrix wh = matmul(w, h);
    double num = 0.0;
    double den = 0.0;
    auto xd = x.data();
    auto whd = wh.data();
    for (std::size_t k = 0; k < xd.size(); ++k) {
        const double m = mask ? mask->data()[k] : 1.0;
        const double r = m * (xd[k] - whd[k]);
        num += r * r;
        den += (m * xd[k]) * (m * xd[k]);
    }
    if (den == 0.0) throw Error(ErrorKind::ZeroDataNorm, "masked data has zero norm");
    return std::sqrt(num / den);
}

double rmse_unobserved(const Matrix& x_full, const Matrix& w, const Matrix& h, const Matrix& mask) {
    require_same_shape(x_full, mask, "rmse_unobserved mask");
    const Matrix wh = matmul(w, h);
    require_same_shape(x_full, wh, "rmse_unobserved product");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < mask.size(); ++k) {
        if (mask.data()[k] != 0.0) continue;
        const double r = x_full.data()[k] - wh.data()[k];
        sum += r * r;
        ++count;
    }
    if (count == 0) throw Error(ErrorKind::EmptyComplement, "mask hides no entries");
    return std::sqrt(sum / static_cast<double>(count));
}

double mrsa(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw Error(ErrorKind::DimensionMismatch, "mrsa vectors differ in length");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        ab += da * db;
        aa += da * da;
        bb += db * db;
    }
    const double na = std::sqrt(aa);
    const double nb = std::sqrt(bb);
    if (na < 1e-14 || nb < 1e-14) throw Error(ErrorKind::DegenerateVector, "mean-removed vector is zero");
    const double c = std::clamp(ab / (na * nb), -1.0, 1.0);
    return 100.0 / std::numbers::pi * std::acos(c);
}

MrsaMatch mrsa_matched(const Matrix& w_true, const Matrix& w_est) {
    require_same_shape(w_true, w_est, "mrsa_matched");
    const std::size_t r = w_true.cols();
    if (r > 12) throw Error(ErrorKind::InvalidInput, "mrsa_matched supports at most 12 columns");

    // cost(k, l) = MRSA(truth column k, estimate column l)
    std::vector<std::vector<double>> cost(r, std::vector<double>(r));
    for (std::size_t k = 0; k < r; ++k) {
        const auto tk = w_true.column(k);
        for (std::size_t l = 0; l < r; ++l) cost[k][l] = mrsa(tk, w_est.column(l));
    }
    auto total = [&](const std::vector<std::size_t>& p) {
        double s = 0.0;
        for (std::size_t k = 0; k < r; ++k) s += cost[k][p[k]];
        return s;
    };

    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best = perm;
    double best_cost = total(perm);

    if (r <= 8) {
        while (std::next_permutation(perm.begin(), perm.end())) {
            const double c = total(perm);
            if (c < best_cost) {
                best_cost = c;
                best = perm;
            }
        }
    } else {
        std::vector<bool> used(r, false);
        for (std::size_t k = 0; k < r; ++k) {
            std::size_t arg = r;
            for (std::size_t l = 0; l < r; ++l)
                if (!used[l] && (arg == r || cost[k][l] < cost[k][arg])) arg = l;
            used[arg] = true;
            best[k] = arg;
        }
        best_cost = total(best);
        for (bool improved = true; improved;) {
            improved = false;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = i + 1; j < r; ++j) {
                    std::swap(best[i], best[j]);
                    const double c = total(best);
                    if (c < best_cost - 1e-15) {
                        best_cost = c;
                        improved = true;
                    } else {
                        std::swap(best[i], best[j]);
                    }
                }
        }
    }
    return {best_cost / static_cast<double>(r), best};
}

double subspace_angle(const Matrix& w, const Matrix& w_est) {
    if (w.rows() != w_est.rows()) throw Error(ErrorKind::DimensionMismatch, "subspace_angle row counts differ");
    const Matrix u = orthonormal_basis(w);
    const Matrix u_est = orthonormal_basis(w_est);
    Matrix diff = u_est - matmul(u, matmul_tn(u, u_est));
    const double s = spectral_norm(diff);
    return std::asin(std::min(1.0, s));
}

}  // namespace volmf
