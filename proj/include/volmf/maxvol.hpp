#pragma once

#include <optional>
#include <string>

#include "volmf/matrix.hpp"
#include "volmf/solver.hpp"

namespace volmf {

enum class MaxvolAlgorithm { adgrad2, admm_bregman, admm_adgrad };

const char* to_string(MaxvolAlgorithm a);
MaxvolAlgorithm parse_maxvol_algorithm(const std::string& s);

/// ½‖X − WH‖² − λ·logdet(HHᵀ + δI) with W ≥ 0 and H column-stochastic, or,
/// when normalized, −λ·logdet(H̃H̃ᵀ + δI) with H̃ the row-normalized H and H ≥ 0.
struct MaxvolModel {
    double lambda = 1.0;
    double delta = 1.0;
    bool normalized = false;
    MaxvolAlgorithm algorithm = MaxvolAlgorithm::adgrad2;
    double rho = 0.01;

    void validate() const;
};

// ∇_W ½‖X − WH‖² = (WH − X)Hᵀ
Matrix maxvol_gradient_w(const Matrix& w, const Matrix& h, const Matrix& x);
// Wᵀ(WH − X) − 2λ(HHᵀ + δI)⁻¹H
Matrix maxvol_gradient_h(const Matrix& w, const Matrix& h, const Matrix& x, double lambda, double delta);

/// logdet(H̃H̃ᵀ + δI) with H̃ = S⁻¹H, S = diag(‖H(i,:)‖). Throws ZeroRow.
double normalized_logdet(const Matrix& h, double delta);
/// Bounds of normalized_logdet for δ > 0: [log(1 + r/δ) + r·log δ, r·log(1 + δ)].
struct LogdetRange {
    double lower;
    double upper;
};
LogdetRange normalized_logdet_range(std::size_t r, double delta);

/// Wᵀ(WH − X) − 2λS⁻¹[(H̃H̃ᵀ + δI)⁻¹ − diag((H̃H̃ᵀ + δI)⁻¹H̃H̃ᵀ)]H̃. Throws ZeroRow.
Matrix normalized_gradient_h(const Matrix& w, const Matrix& h, const Matrix& x, double lambda, double delta);

struct MaxvolTerms {
    double fit = 0.0;
    double logdet = 0.0;
    double objective = 0.0;
};
MaxvolTerms maxvol_terms(const Matrix& x, const FactorPair& f, const MaxvolModel& model);

/// Φ⁺_γ(x) = ½(√(x² + 4γ) + x), evaluated without cancellation for x < 0.
double phi_plus(double x, double gamma);

/// Φ⁺_{λ/ρ}(HHᵀ + δI − Λ/ρ) − δI, applied eigenvalue-wise.
Matrix y_update(const Matrix& h, const Matrix& dual, double rho, double lambda, double delta);

struct BregmanStep {
    Matrix h;
    int iterations = 0;
    bool converged = false;
};

/// Fixed point for H = [Q − eνᵀ]₊ / (α̃‖H‖² + σ̃) with every column on the
/// simplex. Q is sorted once per column. Stops when the relative change of ‖H‖²
/// is at most eps, or after max_iter passes.
BregmanStep bregman_fixed_point(const Matrix& q, double alpha_t, double sigma_t, double norm_sq_init,
                                double eps = 1e-6, int max_iter = 100);

/// One minimization of the quartic-kernel surrogate of the augmented Lagrangian in H.
BregmanStep bregman_h_update(const Matrix& w, const Matrix& x, const Matrix& h_k, const Matrix& y,
                             const Matrix& dual, double rho);

/// W ~ U[0, max X]; H columns uniform on the simplex (or U[0,1] when not simplex).
FactorPair maxvol_random_init(const Matrix& x, std::size_t rank, std::uint64_t seed, bool simplex_h);

FitResult adgrad2_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts,
                      std::optional<FactorPair> init = std::nullopt);
FitResult admm_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts,
                   std::optional<FactorPair> init = std::nullopt);
FitResult nmaxvol_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts,
                      std::optional<FactorPair> init = std::nullopt);

/// Dispatches on model.normalized and model.algorithm.
FitResult maxvol_fit(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts,
                     std::optional<FactorPair> init = std::nullopt);

/// Runs maxvol_fit from seeds opts.seed .. opts.seed+starts-1 and keeps the
/// lowest final objective.
FitResult maxvol_best_of(const Matrix& x, const MaxvolModel& model, const SolverOptions& opts, std::size_t starts);

}  // namespace volmf
