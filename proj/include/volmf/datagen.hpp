#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

struct SyntheticSpec {
    std::size_t m = 200;
    std::size_t n = 200;
    std::size_t r = 5;
    double h_zero_fraction = 0.8;
    double missing_fraction = 0.8;
    double noise_level = 0.0;    // target RMSE between clean and noisy data
    bool normalize_mean_to_one = true;
    // > 0 draws the columns of H from Dirichlet(α) instead of uniform + zeroing
    double dirichlet_alpha = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CompletionInstance {
    Matrix x_noisy;
    Matrix x_clean;
    Matrix mask;  // 1 observed, 0 hidden
    Matrix w_true;
    Matrix h_true;
};

/// W, H ~ U[0,1], a fixed fraction of H zeroed, X = WH scaled to mean one,
/// uniform noise rescaled to the target RMSE (clipped at 0), and a mask hiding
/// an exact fraction of entries with every row and column still observed.
CompletionInstance gen_completion_instance(const SyntheticSpec& spec);

struct SeparableInstance {
    Matrix x;
    std::vector<std::size_t> true_indices;  // column of X holding W(:,k), k = 0..r-1
    Matrix w;
    Matrix h;
};

/// X = W[I_r, H′]Π + N with H′ uniform on the simplex, Π a random column
/// permutation and ‖N(:,j)‖ ≤ noise.
SeparableInstance gen_separable_instance(std::size_t m, std::size_t n, std::size_t r, double noise,
                                         std::uint64_t seed);

/// Named matrices from the worked examples. Throws UnknownFixture.
Matrix fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace volmf
