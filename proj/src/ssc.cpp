#include "volmf/ssc.hpp"

#include <cmath>

#include "volmf/error.hpp"
#include "volmf/separable.hpp"

namespace volmf {

SscReport check_ssc1_necessary(const Matrix& h, double tol) {
    if (h.empty()) throw Error(ErrorKind::InvalidInput, "H is empty");
    if (!(tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "tolerance must be nonnegative");
    const std::size_t r = h.rows();
    if (r < 2) throw Error(ErrorKind::InvalidInput, "SSC check needs r >= 2");
    const double hmax = max_abs(h);
    const double zero_level = tol * hmax;
    if (min_entry(h) < -zero_level) throw Error(ErrorKind::NegativeInput, "H has negative entries");

    SscReport rep;
    rep.row_zero_counts.assign(r, 0);
    for (std::size_t i = 0; i < r; ++i)
        for (double v : h.row(i))
            if (v <= zero_level) ++rep.row_zero_counts[i];
    rep.row_sparsity_ok = true;
    for (std::size_t c : rep.row_zero_counts) rep.row_sparsity_ok = rep.row_sparsity_ok && c + 1 >= r;

    const double limit = tol * std::sqrt(static_cast<double>(r));
    bool corners_ok = true;
    std::vector<double> target(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t k = 0; k < r; ++k) target[k] = k == i ? 0.0 : 1.0;
        const VectorNnlsResult fit = nnls_active_set(h, target);
        const bool inside = fit.residual_norm <= limit;
        rep.corner_membership.push_back(inside);
        rep.corner_residuals.push_back(fit.residual_norm);
        corners_ok = corners_ok && inside;
    }
    rep.necessary_ok = rep.row_sparsity_ok && corners_ok;
    return rep;
}

}  // namespace volmf
