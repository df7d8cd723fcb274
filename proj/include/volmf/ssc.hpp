#pragma once

#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

/// Two necessary conditions for H to be sufficiently scattered. Passing them
/// does not certify the condition; failing either rules it out.
struct SscReport {
    std::vector<std::size_t> row_zero_counts;
    bool row_sparsity_ok = false;        // every row has at least r − 1 zeros
    std::vector<bool> corner_membership; // e − e_i ∈ cone(H)
    std::vector<double> corner_residuals;
    bool necessary_ok = false;
};

SscReport check_ssc1_necessary(const Matrix& h, double tol = 1e-8);

}  // namespace volmf
