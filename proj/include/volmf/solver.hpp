#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

enum class Centering { none, global, row_wise };

const char* to_string(Centering c);
Centering parse_centering(const std::string& s);

struct SolverOptions {
    std::size_t rank = 1;
    std::size_t outer = 500;
    std::size_t inner = 20;
    std::uint64_t seed = 0;
    // stop when |Δobjective| / max(|objective|, tiny) falls below this; 0 disables
    double rel_tol = 0.0;

    void validate(std::size_t m, std::size_t n) const;
};

struct FactorPair {
    Matrix w;
    Matrix h;
};

struct TraceEntry {
    std::size_t iter = 0;
    double elapsed_s = 0.0;
    double fit = 0.0;        // data term
    double reg = 0.0;        // unweighted regularizer value
    double lambda = 0.0;
    double reg_sign = 1.0;   // +1 penalized, −1 rewarded
    double extra = 0.0;      // additional penalty already weighted (γ/2‖H‖²)
    double objective = 0.0;  // fit + reg_sign·λ·reg + extra
    double residual = 0.0;   // ADMM primal residual ‖Y − HHᵀ‖_F, 0 elsewhere
};

struct ConvergenceTrace {
    std::vector<TraceEntry> entries;

    bool empty() const noexcept { return entries.empty(); }
    const TraceEntry& back() const { return entries.back(); }
    bool all_finite() const noexcept;
};

struct FitStatus {
    bool budget_exhausted = false;     // outer budget used up without meeting rel_tol
    bool nonfinite_guard = false;      // a non-finite iterate was rejected
    bool not_positive_definite = false;
    bool fixed_point_unconverged = false;
    bool zero_row_reseeded = false;
    bool zero_step_denominator = false;
    bool bounds_violate_data = false;   // observed X lies outside [a, b]
    double worst_column_sum_error = 0.0; // max |eᵀH − eᵀ|∞ seen over H updates (simplex-structured H)

    bool numerical_failure() const noexcept { return nonfinite_guard || not_positive_definite; }
};

struct FitResult {
    FactorPair factors;
    ConvergenceTrace trace;
    FitStatus status;
    double initial_objective = 0.0;
};

// Wall-clock timer for trace entries.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Nesterov-type inertial sequence shared by the TITAN-style solvers.
struct Inertia {
    double alpha = 1.0;

    // Advances the sequence and returns min((α₀−1)/α₁, cap).
    double next_beta(double cap) noexcept;
};

}  // namespace volmf
