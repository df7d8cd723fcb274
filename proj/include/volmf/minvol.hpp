#pragma once

#include <optional>
#include <string>

#include "volmf/matrix.hpp"
#include "volmf/solver.hpp"
#include "volmf/weighted_data.hpp"

namespace volmf {

enum class MinvolVariant { minvol, minvol_complete, new_minvol, nmf_baseline };

const char* to_string(MinvolVariant v);
MinvolVariant parse_minvol_variant(const std::string& s);

/// ½‖P_Ω(X − WH)‖² + (λ/2)·logdet(WᵀW + δI) [+ (γ/2)‖H‖² for new_minvol].
/// minvol and minvol_complete keep the columns of W on the unit simplex;
/// new_minvol and nmf_baseline only require W ≥ 0. nmf_baseline ignores λ.
struct MinvolModel {
    MinvolVariant variant = MinvolVariant::minvol;
    double lambda = 0.0;
    double delta = 1.0;
    double gamma = 0.0;
    bool autotune = false;

    void validate() const;
    bool simplex_w() const noexcept {
        return variant == MinvolVariant::minvol || variant == MinvolVariant::minvol_complete;
    }
    double effective_lambda() const noexcept { return variant == MinvolVariant::nmf_baseline ? 0.0 : lambda; }
    double effective_gamma() const noexcept { return variant == MinvolVariant::new_minvol ? gamma : 0.0; }
};

struct MinvolTerms {
    double fit = 0.0;         // ½‖P_Ω(X − WH)‖²
    double half_logdet = 0.0; // ½·logdet(WᵀW + δI)
    double h_penalty = 0.0;   // (γ/2)‖H‖²
    double objective = 0.0;
};

MinvolTerms minvol_terms(const WeightedData& data, const FactorPair& f, const MinvolModel& model);

/// Gradient in W of the objective at W̄: P_Ω(W̄H − X)Hᵀ + λW̄(W̄ᵀW̄ + δI)⁻¹.
Matrix minvol_grad_w(const WeightedData& data, const Matrix& w_bar, const Matrix& h, const MinvolModel& model);

/// λ = max(‖P_Ω(X − W₀H₀)‖², 1e-6)/|logdet(W₀ᵀW₀ + δI)| (λ = 1 when the logdet
/// vanishes), γ = 0.01·max(‖P_Ω(X − W₀H₀)‖², 1e-6)/‖H₀‖².
MinvolModel init_hyperparams(const WeightedData& data, const FactorPair& f0, MinvolModel model,
                             bool* zero_logdet = nullptr);

/// Relative objective change |obj_k − obj_{k−1}| / ‖P_Ω X‖² below which λ, γ are rebalanced.
inline constexpr double kAutotuneThreshold = 1e-3;

/// Re-applies init_hyperparams at the current iterate when the last two
/// trace objectives differ by less than kAutotuneThreshold·‖P_Ω X‖².
MinvolModel autotune_step(const ConvergenceTrace& trace, const MinvolModel& model, const WeightedData& data,
                          const FactorPair& current);

/// W ~ U[0,1] projected onto the simplex, H ~ U[0,1] scaled by the least-squares
/// optimal scalar for the observed entries.
FactorPair minvol_random_init(const WeightedData& data, std::size_t rank, std::uint64_t seed);

/// NMF with simplex-structured W run for `iters` outer iterations (λ = γ = 0).
FactorPair warm_start_nmf(const WeightedData& data, std::size_t rank, std::size_t iters, std::uint64_t seed,
                          std::size_t inner = 1);

FitResult minvol_fit(const WeightedData& data, const MinvolModel& model, const SolverOptions& opts,
                     std::optional<FactorPair> init = std::nullopt);

}  // namespace volmf
