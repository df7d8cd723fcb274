// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "volmf/bssmf.hpp"
#include "volmf/cli.hpp"
#include "volmf/datagen.hpp"
#include "volmf/linalg.hpp"
#include "volmf/maxvol.hpp"
#include "volmf/metrics.hpp"
#include "volmf/minvol.hpp"
#include "volmf/projections.hpp"
#include "volmf/separable.hpp"
#include "volmf/solver.hpp"

using namespace volmf;
using namespace volmf::testing;

namespace {

// Tolerances and limits, pinned.
constexpr double kExample1RelErr = 1e-6;
constexpr double kExample1Mrsa = 0.5;
constexpr double kExample1Seconds = 5.0;
constexpr int kSeparableInstances = 50;
constexpr int kRandSpaMinRecovered = 48;
constexpr double kSeparableSeconds = 10.0;
constexpr int kContinuumInstances = 20;
constexpr double kCompletionMaxRmse = 0.1;
constexpr double kCompletionSeconds = 180.0;
constexpr double kHardMinvolTarget = 0.52;
constexpr double kHardNewMinvolTarget = 0.41;
constexpr double kHardTolerance = 0.15;
constexpr double kGradientRelTol = 1e-5;
constexpr int kGradientInstances = 20;
constexpr double kAsymptoticTol = 0.15;
constexpr int kRangeSamples = 10000;
constexpr double kBregmanColumnTol = 1e-6;
constexpr double kAdmmSeconds = 120.0;
constexpr double kSimplexTol = 1e-9;
constexpr double kRootTol = 1e-10;
constexpr int kOracleSamples = 1000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool same_set(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::set<std::size_t>(a.begin(), a.end()) == std::set<std::size_t>(b.begin(), b.end());
}

Outcome example1_recovery() {
    const Stopwatch clock;
    const Matrix x = fixture("example1_X") * 0.25;
    const BssmfProblem p{x, std::nullopt, Bounds::uniform(6, 0.0, 3.0), Centering::none};
    SolverOptions o;
    o.rank = 3;
    o.outer = 500;
    o.inner = 20;
    const FitResult r = bssmf_best_of(p, o, 10);
    const double err = relative_error(x, r.factors.w, r.factors.h);
    const double angle = mrsa_matched(fixture("example1_W"), r.factors.w).mean;
    const double secs = clock.seconds();
    return {err < kExample1RelErr && angle < kExample1Mrsa && secs < kExample1Seconds,
            "relerr " + fmt("%.3g", err) + ", MRSA " + fmt("%.3g", angle) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome separable_recovery() {
    const Stopwatch clock;
    int spa_ok = 0;
    int rand_ok = 0;
    for (int s = 0; s < kSeparableInstances; ++s) {
        const SeparableInstance inst = gen_separable_instance(30, 200, 5, 0.0, 1000 + s);
        spa_ok += same_set(spa_select(inst.x, 5).indices, inst.true_indices);
        RandSpaConfig cfg;
        cfg.rank = 5;
        cfg.nu = 5;
        cfg.kappa = 1.5;
        cfg.runs = 1;
        cfg.seed = static_cast<std::uint64_t>(s);
        rand_ok += same_set(randspa(inst.x, cfg).indices, inst.true_indices);
    }
    const double secs = clock.seconds();
    return {spa_ok == kSeparableInstances && rand_ok >= kRandSpaMinRecovered && secs < kSeparableSeconds,
            "SPA " + std::to_string(spa_ok) + "/50, RandSPA(nu=r) " + std::to_string(rand_ok) + "/50, " +
                fmt("%.2f", secs) + " s"};
}

Outcome randspa_continuum() {
    int equal = 0;
    for (int s = 0; s < kContinuumInstances; ++s) {
        const SeparableInstance inst = gen_separable_instance(25, 120, 5, 0.05, 2000 + s);
        RandSpaConfig cfg;
        cfg.rank = 5;
        cfg.nu = 25;
        cfg.kappa = 1.0;
        cfg.seed = static_cast<std::uint64_t>(s);
        equal += randspa(inst.x, cfg).indices == spa_select(inst.x, 5).indices;
    }
    return {equal == kContinuumInstances, std::to_string(equal) + "/20 identical index sequences"};
}

// Mean hidden-entry RMSE over five seeds for nmf, auto-tuned minvol_complete and new_minvol.
struct CompletionMeans {
    double nmf = 0.0;
    double minvol = 0.0;
    double new_minvol = 0.0;
};

CompletionMeans completion_protocol(std::size_t rank, double missing) {
    CompletionMeans means;
    constexpr int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        SyntheticSpec spec;
        spec.r = rank;
        spec.missing_fraction = missing;
        spec.seed = static_cast<std::uint64_t>(s);
        const CompletionInstance inst = gen_completion_instance(spec);
        const WeightedData d(inst.x_noisy, &inst.mask);
        const FactorPair start = warm_start_nmf(d, rank, 500, static_cast<std::uint64_t>(s));
        SolverOptions o;
        o.rank = rank;
        o.outer = 50;
        o.inner = 20;
        o.seed = static_cast<std::uint64_t>(s);
        for (MinvolVariant v : {MinvolVariant::nmf_baseline, MinvolVariant::minvol_complete, MinvolVariant::new_minvol}) {
            MinvolModel m;
            m.variant = v;
            m.autotune = v != MinvolVariant::nmf_baseline;
            m = init_hyperparams(d, start, m);
            const FitResult r = minvol_fit(d, m, o, start);
            const double e = rmse_unobserved(inst.x_clean, r.factors.w, r.factors.h, inst.mask) / seeds;
            (v == MinvolVariant::nmf_baseline ? means.nmf : v == MinvolVariant::minvol_complete ? means.minvol
                                                                                                : means.new_minvol) += e;
        }
    }
    return means;
}

std::string describe(const CompletionMeans& m) {
    return "RMSE new_minvol " + fmt("%.5f", m.new_minvol) + ", minvol " + fmt("%.5f", m.minvol) + ", nmf " +
           fmt("%.5f", m.nmf);
}

Outcome completion_ordering() {
    const Stopwatch clock;
    const CompletionMeans m = completion_protocol(5, 0.8);
    const double secs = clock.seconds();
    return {m.new_minvol < m.minvol && m.minvol < m.nmf && m.new_minvol < kCompletionMaxRmse &&
                secs < kCompletionSeconds,
            describe(m) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome completion_hard() {
    const CompletionMeans m = completion_protocol(10, 0.9);
    return {std::abs(m.minvol - kHardMinvolTarget) <= kHardTolerance &&
                std::abs(m.new_minvol - kHardNewMinvolTarget) <= kHardTolerance,
            describe(m) + " (targets 0.52 / 0.41 +- 0.15)"};
}

Outcome gradient_oracles() {
    double worst_std = 0.0;
    double worst_norm = 0.0;
    Rng rng(17, "acceptance-grad");
    for (int t = 0; t < kGradientInstances; ++t) {
        const Matrix w = rng.uniform_matrix(6, 3);
        Matrix h = rng.uniform_matrix(3, 5);
        for (double& v : h.data()) v += 0.05;
        const Matrix x = rng.uniform_matrix(6, 5);
        const double lambda = 0.1 + rng.uniform();
        const double delta = 0.1 + rng.uniform();
        const Matrix fd_std = central_difference(h, [&](const Matrix& hh) {
            Matrix g = outer_gram(hh);
            add_to_diagonal(g, delta);
            return 0.5 * frobenius_norm_sq(x - matmul(w, hh)) - lambda * logdet_spd(g);
        });
        const Matrix fd_norm = central_difference(h, [&](const Matrix& hh) {
            return 0.5 * frobenius_norm_sq(x - matmul(w, hh)) - lambda * normalized_logdet(hh, delta);
        });
        worst_std = std::max(worst_std, rel_diff(maxvol_gradient_h(w, h, x, lambda, delta), fd_std));
        worst_norm = std::max(worst_norm, rel_diff(normalized_gradient_h(w, h, x, lambda, delta), fd_norm));
    }
    return {worst_std < kGradientRelTol && worst_norm < kGradientRelTol,
            "worst relative error standard " + fmt("%.2e", worst_std) + ", normalized " + fmt("%.2e", worst_norm)};
}

Outcome maxvol_asymptotics() {
    constexpr std::size_t r = 4;
    constexpr std::size_t n = 16;
    Rng rng(1, "acceptance-asym");
    const Matrix w = rng.uniform_matrix(20, r);
    const Matrix h = project_simplex_columns(rng.uniform_matrix(r, n));
    const Matrix x = matmul(w, h);
    SolverOptions o;
    o.rank = r;
    o.outer = 500;
    o.inner = 20;
    o.seed = 3;

    MaxvolModel std_model;
    std_model.lambda = 50.0;
    const FitResult a = maxvol_best_of(x, std_model, o, 10);
    const Matrix target = Matrix::identity(r) * (static_cast<double>(n) / r);
    const double off_std = frobenius_norm(outer_gram(a.factors.h) - target) / frobenius_norm(target);

    MaxvolModel norm_model;
    norm_model.lambda = 50.0;
    norm_model.delta = 0.5;
    norm_model.normalized = true;
    const FitResult b = maxvol_fit(x, norm_model, o);
    Matrix ht = b.factors.h;
    for (std::size_t i = 0; i < r; ++i) {
        const double s = norm2(ht.row(i));
        for (double& v : ht.row(i)) v /= s;
    }
    const double off_norm = frobenius_norm(outer_gram(ht) - Matrix::identity(r)) / std::sqrt(double(r));
    return {off_std <= kAsymptoticTol && off_norm <= kAsymptoticTol,
            "standard (best of 10 by objective) " + fmt("%.4f", off_std) + ", normalized " + fmt("%.4f", off_norm)};
}

Outcome logdet_range() {
    Rng rng(19, "acceptance-range");
    int violations = 0;
    int samples = 0;
    for (std::size_t r : {3u, 5u}) {
        for (double delta : {0.5, 1.0}) {
            const LogdetRange range = normalized_logdet_range(r, delta);
            for (int t = 0; t < kRangeSamples / 4; ++t) {
                const std::size_t n = r + static_cast<std::size_t>(rng.uniform() * 20.0);
                Matrix h = rng.uniform_matrix(r, n);
                // sparsify, then make sure no row vanishes
                const double cut = rng.uniform();
                for (double& v : h.data()) v = v < cut ? 0.0 : v;
                for (std::size_t i = 0; i < r; ++i) h(i, static_cast<std::size_t>(rng.uniform() * n) % n) += 0.01;
                const double v = normalized_logdet(h, delta);
                violations += v < range.lower - 1e-10 || v > range.upper + 1e-10;
                ++samples;
            }
        }
    }
    return {violations == 0 && samples == kRangeSamples,
            std::to_string(violations) + " violations in " + std::to_string(samples) + " samples"};
}

Outcome admm_comparisons() {
    const Stopwatch clock;
    SyntheticSpec spec;
    spec.m = 50;
    spec.n = 500;
    spec.r = 5;
    spec.missing_fraction = 0.0;
    spec.dirichlet_alpha = 0.2;
    spec.normalize_mean_to_one = false;
    spec.seed = 7;
    const Matrix x = gen_completion_instance(spec).x_clean;
    SolverOptions o;
    o.rank = 5;
    o.outer = 500;
    o.inner = 20;
    o.seed = 11;
    auto fit = [&](MaxvolAlgorithm a, double rho) {
        MaxvolModel m;
        m.lambda = 1.0;
        m.algorithm = a;
        m.rho = rho;
        return maxvol_fit(x, m, o);
    };
    const FitResult b001 = fit(MaxvolAlgorithm::admm_bregman, 0.01);
    const FitResult b01 = fit(MaxvolAlgorithm::admm_bregman, 0.1);
    const FitResult g001 = fit(MaxvolAlgorithm::admm_adgrad, 0.01);
    const FitResult g01 = fit(MaxvolAlgorithm::admm_adgrad, 0.1);
    const double secs = clock.seconds();
    const double column_err = std::max(b001.status.worst_column_sum_error, b01.status.worst_column_sum_error);
    const double residual_drop = b001.trace.entries.front().residual / b001.trace.back().residual;
    const bool rho_order = b001.trace.back().objective <= b01.trace.back().objective;
    const bool algo_order = b001.trace.back().objective <= g001.trace.back().objective &&
                            b01.trace.back().objective <= g01.trace.back().objective;
    return {rho_order && algo_order && column_err <= kBregmanColumnTol && residual_drop >= 10.0 &&
                secs < kAdmmSeconds,
            "objective bregman rho .01 " + fmt("%.8g", b001.trace.back().objective) + ", rho .1 " +
                fmt("%.8g", b01.trace.back().objective) + ", adgrad rho .01 " +
                fmt("%.8g", g001.trace.back().objective) + ", rho .1 " + fmt("%.8g", g01.trace.back().objective) +
                "; column error " + fmt("%.1e", column_err) + "; residual drop " + fmt("%.3g", residual_drop) +
                "x; " + fmt("%.1f", secs) + " s"};
}

Outcome projection_oracles() {
    Rng rng(23, "acceptance-proj");
    double worst_simplex = 0.0;
    for (int t = 0; t < kOracleSamples; ++t) {
        const std::size_t len = t % 2 ? 3 : 4;
        std::vector<double> q(len);
        for (double& v : q) v = 4.0 * rng.normal();
        const std::vector<double> got = project_simplex(q);
        const std::vector<double> want = brute_force_simplex(q);
        for (std::size_t i = 0; i < len; ++i) worst_simplex = std::max(worst_simplex, std::abs(got[i] - want[i]));
    }
    double worst_root = 0.0;
    for (int t = 0; t < kOracleSamples; ++t) {
        const double x = 20.0 * rng.normal();
        const double gamma = std::exp(6.0 * rng.uniform() - 3.0);
        const double z = phi_plus(x, gamma);
        // residual of z² − xz − γ, relative to the size of its terms
        const double scale = std::max({z * z, std::abs(x * z), gamma});
        worst_root = std::max(worst_root, std::abs(z * z - x * z - gamma) / scale);
    }
    return {worst_simplex <= kSimplexTol && worst_root <= kRootTol,
            "simplex max deviation " + fmt("%.2e", worst_simplex) + ", root residual " + fmt("%.2e", worst_root)};
}

Outcome cli_determinism() {
    TempDir dir("acceptance-cli");
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) { return cli_dispatch(args, sink, sink); };
    const std::string sep = (dir / "sep").string();
    const std::string comp = (dir / "comp").string();
    const std::string fix = (dir / "fix").string();
    run({"gen", "--kind", "separable", "--m", "12", "--n", "40", "--rank", "3", "--noise", "0.01", "--seed", "4",
         "--out-dir", sep});
    run({"gen", "--kind", "completion", "--m", "20", "--n", "25", "--rank", "3", "--missing", "0.4", "--seed", "5",
         "--out-dir", comp});
    run({"gen", "--kind", "fixture", "--name", "example1_H", "--out-dir", fix});

    const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
        {"gen", {"gen", "--kind", "completion", "--m", "10", "--n", "12", "--rank", "2", "--noise", "0.1"}},
        {"spa", {"spa", "--input", sep + "/X.csv", "--rank", "3", "--nu", "4", "--kappa", "1.5", "--runs", "5"}},
        {"bssmf", {"bssmf", "--input", sep + "/X.csv", "--rank", "3", "--outer", "30", "--runs", "2", "--trace"}},
        {"minvol", {"minvol", "--input", comp + "/X_full.csv", "--rank", "3", "--outer", "20", "--warm-start-iters",
                    "20", "--autotune"}},
        {"minvol-complete", {"minvol-complete", "--input", comp + "/X.csv", "--missing-nan", "--rank", "3",
                             "--variant", "new_minvol", "--outer", "20", "--warm-start-iters", "20"}},
        {"maxvol", {"maxvol", "--input", sep + "/X.csv", "--rank", "3", "--outer", "30", "--algo", "admm"}},
        {"nmaxvol", {"nmaxvol", "--input", sep + "/X.csv", "--rank", "3", "--outer", "30", "--maps", "5x8"}},
        {"ssc-check", {"ssc-check", "--input", fix + "/example1_H.csv"}},
    };
    int reproduced = 0;
    std::string failed;
    for (const auto& [name, args] : runs) {
        std::vector<std::string> first = args;
        first.push_back("--out-dir");
        first.push_back((dir / (name + "-1")).string());
        const int code = run(first);
        const int replay = code == kExitOk ? run({"replay", "--manifest", (dir / (name + "-1/manifest.json")).string(),
                                                  "--out-dir", (dir / (name + "-2")).string()})
                                           : -1;
        if (replay == kExitOk) {
            ++reproduced;
        } else {
            failed += " " + name;
        }
    }
    return {reproduced == static_cast<int>(runs.size()),
            std::to_string(reproduced) + "/" + std::to_string(runs.size()) + " subcommands reproduced" +
                (failed.empty() ? "" : ", failed:" + failed)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"example-1 recovery", example1_recovery},
        {"separable exact recovery", separable_recovery},
        {"RandSPA continuum", randspa_continuum},
        {"completion ordering", completion_ordering},
        {"completion hard regime", completion_hard},
        {"gradient oracles", gradient_oracles},
        {"MaxVol asymptotics", maxvol_asymptotics},
        {"normalized logdet range", logdet_range},
        {"ADMM comparisons", admm_comparisons},
        {"projection oracles", projection_oracles},
        {"CLI determinism", cli_determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
