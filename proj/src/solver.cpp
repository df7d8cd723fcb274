#include "volmf/solver.hpp"

#include <algorithm>
#include <cmath>

#include "volmf/error.hpp"

namespace volmf {

const char* to_string(Centering c) {
    switch (c) {
        case Centering::none: return "none";
        case Centering::global: return "global";
        case Centering::row_wise: return "row_wise";
    }
    return "none";
}

Centering parse_centering(const std::string& s) {
    if (s == "none") return Centering::none;
    if (s == "global") return Centering::global;
    if (s == "row_wise" || s == "row-wise" || s == "rowwise") return Centering::row_wise;
    throw Error(ErrorKind::InvalidInput, "unknown centering mode '" + s + "'");
}

void SolverOptions::validate(std::size_t m, std::size_t n) const {
    if (rank == 0 || rank > std::min(m, n)) {
        throw Error(ErrorKind::InvalidInput, "rank must satisfy 1 <= r <= min(m, n)");
    }
    if (outer == 0 || inner == 0) throw Error(ErrorKind::InvalidInput, "iteration budgets must be positive");
    if (!(rel_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "rel_tol must be nonnegative");
}

bool ConvergenceTrace::all_finite() const noexcept {
    return std::all_of(entries.begin(), entries.end(), [](const TraceEntry& e) {
        return std::isfinite(e.fit) && std::isfinite(e.reg) && std::isfinite(e.objective);
    });
}

double Inertia::next_beta(double cap) noexcept {
    const double a0 = alpha;
    alpha = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * a0 * a0));
    return std::min((a0 - 1.0) / alpha, cap);
}

}  // namespace volmf
