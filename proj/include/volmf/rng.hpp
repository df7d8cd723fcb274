#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "volmf/matrix.hpp"

namespace volmf {

/// xoshiro256** seeded through SplitMix64 ("volmf-rng/1").
///
/// Streams are derived from (seed, purpose tag, index): the tag is hashed with
/// 64-bit FNV-1a and the three words are folded through SplitMix64, so a
/// generator for a given triple is identical on every platform. Uniform doubles
/// take the top 53 bits; normals use the Box-Muller transform.
class Rng {
public:
    static constexpr std::string_view kName = "volmf-rng/1 (xoshiro256**, splitmix64 streams)";

    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;  // [0, 1)
    double uniform(double lo, double hi) noexcept;
    double normal() noexcept;
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;
    // Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape) noexcept;

    Matrix uniform_matrix(std::size_t rows, std::size_t cols, double lo = 0.0, double hi = 1.0);
    Matrix normal_matrix(std::size_t rows, std::size_t cols);

    template <class T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace volmf
