#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../support.hpp"
#include "volmf/error.hpp"
#include "volmf/metrics.hpp"

using namespace volmf;
using namespace volmf::testing;

TEST_SUITE("relative_error") {
    TEST_CASE("exact, zero and hand cases") {
        Rng rng(21, "relerr");
        const Matrix w = rng.uniform_matrix(5, 2);
        const Matrix h = rng.uniform_matrix(2, 4);
        CHECK(relative_error(matmul(w, h), w, h) == doctest::Approx(0.0));
        CHECK(relative_error(matmul(w, h), Matrix(5, 2), h) == doctest::Approx(1.0));
        const Matrix x{{1, 0}, {0, 1}};
        CHECK(relative_error(x, Matrix{{1}, {0}}, Matrix{{1, 0}}) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK_THROWS_AS((void)relative_error(Matrix(2, 2), Matrix{{1}, {0}}, Matrix{{1, 0}}), Error);
    }

    TEST_CASE("mask restricts both norms") {
        const Matrix x{{1, 5}, {0, 1}};
        const Matrix mask{{1, 0}, {1, 1}};
        // WH = I: the only mismatch (5 vs 0) is hidden
        CHECK(relative_error(x, Matrix::identity(2), Matrix::identity(2), &mask) == doctest::Approx(0.0));
    }
}

TEST_SUITE("rmse_unobserved") {
    TEST_CASE("hand cases") {
        const Matrix x{{1, 2}, {3, 4}};
        const Matrix id = Matrix::identity(2);
        CHECK(rmse_unobserved(x, x, id, Matrix{{1, 0}, {1, 1}}) == doctest::Approx(0.0));
        const Matrix est{{1, 2.3}, {3, 4}};
        CHECK(rmse_unobserved(x, est, id, Matrix{{1, 0}, {1, 1}}) == doctest::Approx(0.3));
        const Matrix est2{{4, 2}, {3, 8}};
        CHECK(rmse_unobserved(x, est2, id, Matrix{{0, 1}, {1, 0}}) == doctest::Approx(5.0 / std::sqrt(2.0)));
        CHECK_THROWS_AS((void)rmse_unobserved(x, x, id, Matrix(2, 2, 1.0)), Error);
    }

    TEST_CASE("all hidden equals the plain RMSE") {
        Rng rng(22, "rmse");
        const Matrix x = rng.uniform_matrix(4, 6);
        const Matrix w = rng.uniform_matrix(4, 2);
        const Matrix h = rng.uniform_matrix(2, 6);
        const double plain = std::sqrt(frobenius_norm_sq(x - matmul(w, h)) / 24.0);
        CHECK(std::abs(rmse_unobserved(x, w, h, Matrix(4, 6)) - plain) <= 1e-12);
    }
}

TEST_SUITE("mrsa") {
    TEST_CASE("identities") {
        const std::vector<double> a{1, 4, 2, 8};
        CHECK(mrsa(a, a) == doctest::Approx(0.0));
        std::vector<double> shifted = a;
        for (double& v : shifted) v += 7.0;
        CHECK(mrsa(a, shifted) == doctest::Approx(0.0));
        const double mean = 15.0 / 4.0;
        std::vector<double> flipped(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) flipped[i] = 2.0 * mean - a[i];
        CHECK(mrsa(a, flipped) == doctest::Approx(100.0));
        CHECK_THROWS_AS((void)mrsa(a, std::vector<double>{2, 2, 2, 2}), Error);
    }

    TEST_CASE("symmetric, scale and shift invariant") {
        Rng rng(23, "mrsa");
        for (int t = 0; t < 50; ++t) {
            const Matrix p = rng.normal_matrix(2, 7);
            const auto a = p.row(0);
            const auto b = p.row(1);
            const double v = mrsa(a, b);
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
            CHECK(std::abs(mrsa(b, a) - v) <= 1e-10);
            std::vector<double> bs(b.begin(), b.end());
            for (double& x : bs) x = 3.5 * x - 2.0;
            CHECK(std::abs(mrsa(a, bs) - v) <= 1e-8);
        }
    }

    TEST_CASE("matched mean equals the exhaustive oracle") {
        Rng rng(24, "mrsa-match");
        const Matrix w = rng.uniform_matrix(6, 3);
        CHECK(mrsa_matched(w, w).mean == doctest::Approx(0.0));
        const std::vector<std::size_t> swap{2, 0, 1};
        CHECK(mrsa_matched(w, select_columns(w, swap)).mean == doctest::Approx(0.0));

        Matrix corrupted = select_columns(w, swap);
        for (std::size_t i = 0; i < 6; ++i) corrupted(i, 1) = rng.uniform();
        std::vector<std::size_t> perm{0, 1, 2};
        double best = 1e300;
        do {
            double s = 0.0;
            for (std::size_t k = 0; k < 3; ++k) s += mrsa(w.column(k), corrupted.column(perm[k]));
            best = std::min(best, s / 3.0);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(mrsa_matched(w, corrupted).mean == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_SUITE("subspace_angle") {
    TEST_CASE("geometry") {
        Rng rng(25, "angle");
        const Matrix w = rng.normal_matrix(6, 3);
        const Matrix q = rng.normal_matrix(3, 3);
        CHECK(subspace_angle(w, matmul(w, q)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
        const Matrix e1{{1}, {0}};
        const Matrix e2{{0}, {1}};
        const Matrix diag{{1 / std::sqrt(2.0)}, {1 / std::sqrt(2.0)}};
        CHECK(subspace_angle(e1, e2) == doctest::Approx(std::numbers::pi / 2));
        CHECK(subspace_angle(e1, diag) == doctest::Approx(std::numbers::pi / 4));
    }

    TEST_CASE("symmetric for equal ranks") {
        Rng rng(26, "angle-sym");
        for (int t = 0; t < 10; ++t) {
            const Matrix a = rng.normal_matrix(8, 3);
            const Matrix b = rng.normal_matrix(8, 3);
            CHECK(std::abs(subspace_angle(a, b) - subspace_angle(b, a)) <= 1e-8);
        }
    }
}
