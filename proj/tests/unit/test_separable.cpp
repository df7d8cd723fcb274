#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "../support.hpp"
#include "volmf/datagen.hpp"
#include "volmf/error.hpp"
#include "volmf/separable.hpp"

using namespace volmf;
using namespace volmf::testing;

namespace {

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("spa_select") {
    TEST_CASE("hand example") {
        const Matrix x{{1, 0, 0.5}, {0, 1, 0.5}};
        const SelectionResult r = spa_select(x, 2);
        CHECK(r.indices == std::vector<std::size_t>{0, 1});
        CHECK(r.relative_error < 1e-6);
    }

    TEST_CASE("ties go to the lowest index") {
        const Matrix x{{0.1, 0.2, 3, 0.3, 0.1, 3}, {0.2, 0.1, 4, 0.1, 0.3, 4}};
        CHECK(spa_select(x, 1).indices.front() == 2);
    }

    TEST_CASE("noiseless separable recovery and scale invariance") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const SeparableInstance inst = gen_separable_instance(20, 60, 4, 0.0, seed);
            const SelectionResult r = spa_select(inst.x, 4);
            CHECK(as_set(r.indices) == as_set(inst.true_indices));
            CHECK(spa_select(inst.x * 3.0, 4).indices == r.indices);
            for (double v : r.selection_values) CHECK(v > 0.0);
        }
    }

    TEST_CASE("deflation basis is orthonormal so the projector is exact") {
        const SeparableInstance inst = gen_separable_instance(12, 40, 5, 0.01, 3);
        const SelectionResult r = spa_select(inst.x, 5);
        const Matrix v = r.basis;
        Matrix p = Matrix::identity(12) - outer_gram(v);
        CHECK(frobenius_norm(matmul(p, p) - p) < 1e-8);
        CHECK(frobenius_norm(p - transpose(p)) < 1e-12);
        CHECK(trace(p) == doctest::Approx(7.0).epsilon(1e-8));
    }

    TEST_CASE("rank deficient data") {
        const Matrix x{{1, 2, 3}, {2, 4, 6}};
        CHECK_THROWS_AS((void)spa_select(x, 2), Error);
    }
}

TEST_SUITE("random Q") {
    TEST_CASE("gram is diag(1, 1/kappa, ...)") {
        RandSpaConfig cfg;
        cfg.rank = 3;
        cfg.nu = 4;
        cfg.kappa = 2.5;
        cfg.seed = 9;
        for (std::size_t step = 0; step < 5; ++step) {
            const Matrix q = gen_random_q(10, cfg, 1, step);
            Matrix expect = Matrix::identity(4) * (1.0 / 2.5);
            expect(0, 0) = 1.0;
            CHECK(max_abs_diff(gram(q), expect) < 1e-10);
        }
        CHECK(gen_random_q(10, cfg, 2, 0) == gen_random_q(10, cfg, 2, 0));
        CHECK_FALSE(gen_random_q(10, cfg, 2, 0) == gen_random_q(10, cfg, 3, 0));
    }

    TEST_CASE("nu = m, kappa = 1 gives QQᵀ = I") {
        RandSpaConfig cfg;
        cfg.rank = 2;
        cfg.nu = 6;
        const Matrix q = gen_random_q(6, cfg, 0, 0);
        CHECK(max_abs_diff(outer_gram(q), Matrix::identity(6)) < 1e-10);
    }

    TEST_CASE("config validation") {
        RandSpaConfig cfg;
        cfg.rank = 2;
        cfg.nu = 0;
        CHECK_THROWS_AS(cfg.validate(5), Error);
        cfg.nu = 2;
        cfg.kappa = 0.5;
        CHECK_THROWS_AS(cfg.validate(5), Error);
        cfg.kappa = 1.0;
        CHECK_NOTHROW(cfg.validate(5));
        CHECK(cfg.provable());
    }
}

TEST_SUITE("randspa") {
    TEST_CASE("nu = m, kappa = 1 reproduces SPA") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const SeparableInstance inst = gen_separable_instance(15, 50, 4, 0.05, seed);
            RandSpaConfig cfg;
            cfg.rank = 4;
            cfg.nu = 15;
            cfg.seed = seed;
            CHECK(randspa(inst.x, cfg).indices == spa_select(inst.x, 4).indices);
        }
    }

    TEST_CASE("noiseless recovery with nu >= r in every run") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const SeparableInstance inst = gen_separable_instance(15, 60, 3, 0.0, 100 + seed);
            RandSpaConfig cfg;
            cfg.rank = 3;
            cfg.nu = 3;
            cfg.kappa = 1.5;
            cfg.runs = 1;
            cfg.seed = seed;
            CHECK(as_set(randspa(inst.x, cfg).indices) == as_set(inst.true_indices));
        }
    }

    TEST_CASE("best of 30 is no worse than the median single run") {
        const SeparableInstance inst = gen_separable_instance(20, 100, 5, 0.3, 77);
        RandSpaConfig cfg;
        cfg.rank = 5;
        cfg.nu = 5;
        cfg.kappa = 1.5;
        cfg.seed = 5;
        std::vector<double> singles;
        for (std::uint64_t s = 0; s < 30; ++s) {
            RandSpaConfig one = cfg;
            one.seed = 1000 + s;
            singles.push_back(randspa(inst.x, one).relative_error);
        }
        std::nth_element(singles.begin(), singles.begin() + 15, singles.end());
        cfg.runs = 30;
        CHECK(randspa(inst.x, cfg).relative_error <= singles[15]);
    }
}

TEST_SUITE("nnls") {
    TEST_CASE("orthonormal W recovers planted coefficients") {
        Rng rng(41, "nnls");
        const Matrix w = orthonormal_basis(rng.normal_matrix(8, 3));
        const Matrix h0 = rng.uniform_matrix(3, 10);
        const NnlsResult r = nnls_solve(w, matmul(w, h0));
        CHECK(r.converged);
        CHECK(max_abs_diff(r.h, h0) < 1e-6);

        Matrix neg(8, 1);
        for (std::size_t i = 0; i < 8; ++i) neg(i, 0) = -w(i, 0);
        CHECK(max_abs(nnls_solve(w, neg).h) < 1e-12);
    }

    TEST_CASE("2x2 instance against a grid search") {
        const Matrix w{{1.0, 0.4}, {0.3, 1.0}};
        const Matrix x{{0.9}, {-0.2}};
        const NnlsResult r = nnls_solve(w, x);
        auto objective = [&](double a, double b) {
            const double r0 = x(0, 0) - w(0, 0) * a - w(0, 1) * b;
            const double r1 = x(1, 0) - w(1, 0) * a - w(1, 1) * b;
            return 0.5 * (r0 * r0 + r1 * r1);
        };
        double best = 1e300;
        for (int i = 0; i <= 2000; ++i)
            for (int j = 0; j <= 2000; ++j) best = std::min(best, objective(i * 1e-3, j * 1e-3));
        CHECK(objective(r.h(0, 0), r.h(1, 0)) <= best + 1e-5);
        CHECK(objective(r.h(0, 0), r.h(1, 0)) >= best - 1e-5);
    }

    TEST_CASE("active set agrees with the gradient solver") {
        Rng rng(42, "nnls-as");
        const Matrix w = rng.uniform_matrix(7, 4);
        const Matrix x = rng.normal_matrix(7, 1);
        const VectorNnlsResult as = nnls_active_set(w, x.column(0));
        const NnlsResult pg = nnls_solve(w, x, 20000, 1e-10);
        for (std::size_t k = 0; k < 4; ++k) CHECK(as.y[k] == doctest::Approx(pg.h(k, 0)).epsilon(1e-6).scale(1.0));
    }
}
