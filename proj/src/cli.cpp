#include "volmf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "volmf/bssmf.hpp"
#include "volmf/datagen.hpp"
#include "volmf/error.hpp"
#include "volmf/io.hpp"
#include "volmf/maxvol.hpp"
#include "volmf/metrics.hpp"
#include "volmf/minvol.hpp"
#include "volmf/separable.hpp"
#include "volmf/ssc.hpp"
#include "volmf/weighted_data.hpp"

namespace volmf {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Binds CLI11 options and remembers how to serialize each resolved value.
class Recorder {
public:
    explicit Recorder(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* option(const std::string& name, T& var, const std::string& desc) {
        dumps_.emplace_back(name, [&var] { return json(var); });
        return app_->add_option("--" + name, var, desc)->capture_default_str();
    }

    // Stored absolute so a manifest can be replayed from any directory.
    CLI::Option* path(const std::string& name, std::string& var, const std::string& desc) {
        dumps_.emplace_back(name, [&var] {
            return var.empty() ? json(var) : json(fs::absolute(var).lexically_normal().string());
        });
        return app_->add_option("--" + name, var, desc);
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
        dumps_.emplace_back(name, [&var] { return json(var); });
        return app_->add_flag("--" + name, var, desc);
    }

    json resolved() const {
        json j = json::object();
        for (const auto& [name, dump] : dumps_) j[name] = dump();
        return j;
    }

    CLI::App* app() const noexcept { return app_; }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<json()>>> dumps_;
};

struct State {
    // shared
    std::string input;
    std::string mask;
    bool missing_nan = false;
    std::size_t rank = 0;
    std::uint64_t seed = 0;
    std::size_t outer = 500;
    std::size_t inner = 20;
    std::string out_dir = ".";
    bool trace = false;
    std::string maps;
    std::size_t runs = 1;

    // gen
    std::string kind = "completion";
    std::string fixture_name;
    std::size_t m = 200;
    std::size_t n = 200;
    std::size_t gen_rank = 5;
    double h_zero = 0.8;
    double missing = 0.8;
    double noise = 0.0;
    double dirichlet = 0.0;
    bool raw_scale = false;

    // spa
    std::size_t nu = 0;
    double kappa = 1.0;

    // bssmf
    std::string bounds = "auto";
    std::string centering = "none";

    // minvol
    std::string variant;
    double lambda = 0.0;
    double delta = 1.0;
    double gamma = 0.0;
    bool autotune = false;
    std::size_t warm_start_iters = 0;
    std::size_t complete_warm_start_iters = 500;

    // maxvol
    double mv_lambda = 1.0;
    double mv_delta = 1.0;
    double nmv_delta = 0.5;
    double rho = 0.01;
    std::string algo = "adgrad";

    // ssc-check
    double tol = 1e-8;

    // replay
    std::string manifest;
};

// Writes outputs under one directory and collects what the manifest needs.
class RunContext {
public:
    RunContext(std::string subcommand, const State& s, json options)
        : subcommand_(std::move(subcommand)), dir_(s.out_dir), options_(std::move(options)), seed_(s.seed) {
        fs::create_directories(dir_);
    }

    void input(const std::string& path) {
        if (path.empty()) return;
        inputs_.push_back({{"path", fs::absolute(path).lexically_normal().string()},
                           {"fnv1a", hex64(fnv1a_file(path))}});
    }

    void matrix(const std::string& name, const Matrix& m, const Matrix* mask = nullptr) {
        write_matrix_csv(m, dir_ / name, mask);
        record(name, true);
    }

    void indices(const std::string& name, std::span<const std::size_t> idx) {
        write_indices(idx, dir_ / name);
        record(name, true);
    }

    // elapsed times differ between runs, so the trace is excluded from replay checks
    void trace(const std::string& name, const ConvergenceTrace& t) {
        write_trace_tsv(t, dir_ / name);
        record(name, false);
    }

    void pgm(const std::string& name, std::span<const double> h, std::size_t w, std::size_t ht) {
        write_abundance_pgm(h, w, ht, dir_ / name);
        record(name, true);
    }

    void text_file(const std::string& name, const std::string& text) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << text;
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir_ / name).string());
        out.close();
        record(name, true);
    }

    void status(json s) { status_ = std::move(s); }

    void write_manifest(int exit_code, double wall_s) const {
        json j;
        j["subcommand"] = subcommand_;
        j["version"] = kVersion;
        j["seed"] = seed_;
        j["options"] = options_;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        j["status"] = status_;
        j["exit_code"] = exit_code;
        j["wall_time_s"] = wall_s;
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << j.dump(2) << '\n';
        if (!out) throw Error(ErrorKind::IoError, "cannot write manifest");
    }

private:
    void record(const std::string& name, bool deterministic) {
        outputs_.push_back(
            {{"path", name}, {"fnv1a", hex64(fnv1a_file(dir_ / name))}, {"deterministic", deterministic}});
    }

    std::string subcommand_;
    fs::path dir_;
    json options_;
    std::uint64_t seed_;
    json inputs_ = json::array();
    json outputs_ = json::array();
    json status_ = json::object();
};

json status_json(const FitResult& r) {
    const FitStatus& s = r.status;
    json j;
    j["iterations"] = r.trace.entries.size();
    j["final_objective"] = r.trace.empty() ? r.initial_objective : r.trace.back().objective;
    j["budget_exhausted"] = s.budget_exhausted;
    j["nonfinite_guard"] = s.nonfinite_guard;
    j["not_positive_definite"] = s.not_positive_definite;
    j["fixed_point_unconverged"] = s.fixed_point_unconverged;
    j["zero_row_reseeded"] = s.zero_row_reseeded;
    j["zero_step_denominator"] = s.zero_step_denominator;
    j["bounds_violate_data"] = s.bounds_violate_data;
    j["worst_column_sum_error"] = s.worst_column_sum_error;
    return j;
}

struct Loaded {
    Matrix x;
    std::optional<Matrix> mask;
};

Loaded load_input(const State& s, RunContext& ctx) {
    MatrixFile f = read_matrix_csv(s.input, s.missing_nan);
    ctx.input(s.input);
    Loaded l{std::move(f.data), std::move(f.mask)};
    if (!s.mask.empty()) {
        Matrix m = read_matrix_csv(s.mask, false).data;
        ctx.input(s.mask);
        if (m.rows() != l.x.rows() || m.cols() != l.x.cols()) {
            throw Error(ErrorKind::ShapeMismatch, "mask shape differs from the input");
        }
        l.mask = l.mask ? hadamard(*l.mask, m) : std::move(m);
    }
    return l;
}

SolverOptions solver_options(const State& s) {
    SolverOptions o;
    o.rank = s.rank;
    o.outer = s.outer;
    o.inner = s.inner;
    o.seed = s.seed;
    return o;
}

std::pair<std::size_t, std::size_t> parse_maps(const std::string& spec) {
    const auto x = spec.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument(spec);
        std::size_t used = 0;
        const std::size_t w = std::stoul(spec.substr(0, x), &used);
        if (used != x) throw std::invalid_argument(spec);
        const std::string rest = spec.substr(x + 1);
        const std::size_t h = std::stoul(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(spec);
        return {w, h};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidInput, "--maps expects WIDTHxHEIGHT, got '" + spec + "'");
    }
}

void write_factors(const State& s, RunContext& ctx, const FitResult& r) {
    ctx.matrix("W.csv", r.factors.w);
    ctx.matrix("H.csv", r.factors.h);
    if (s.trace && !r.trace.empty()) ctx.trace("trace.tsv", r.trace);
    if (!s.maps.empty()) {
        const auto [w, h] = parse_maps(s.maps);
        for (std::size_t k = 0; k < r.factors.h.rows(); ++k) {
            ctx.pgm("map_" + std::to_string(k + 1) + ".pgm", r.factors.h.row(k), w, h);
        }
    }
    ctx.status(status_json(r));
}

int fit_exit(const FitResult& r) { return r.status.numerical_failure() ? kExitNumerical : kExitOk; }

int run_gen(const State& s, RunContext& ctx, std::ostream& out) {
    if (s.kind == "completion") {
        SyntheticSpec spec;
        spec.m = s.m;
        spec.n = s.n;
        spec.r = s.gen_rank;
        spec.h_zero_fraction = s.h_zero;
        spec.missing_fraction = s.missing;
        spec.noise_level = s.noise;
        spec.normalize_mean_to_one = !s.raw_scale;
        spec.dirichlet_alpha = s.dirichlet;
        spec.seed = s.seed;
        const CompletionInstance inst = gen_completion_instance(spec);
        ctx.matrix("X.csv", inst.x_noisy, &inst.mask);
        ctx.matrix("X_full.csv", inst.x_noisy);
        ctx.matrix("X_clean.csv", inst.x_clean);
        ctx.matrix("mask.csv", inst.mask);
        ctx.matrix("W.csv", inst.w_true);
        ctx.matrix("H.csv", inst.h_true);
    } else if (s.kind == "separable") {
        const SeparableInstance inst = gen_separable_instance(s.m, s.n, s.gen_rank, s.noise, s.seed);
        ctx.matrix("X.csv", inst.x);
        ctx.matrix("W.csv", inst.w);
        ctx.matrix("H.csv", inst.h);
        ctx.indices("indices.tsv", inst.true_indices);
    } else if (s.kind == "fixture") {
        ctx.matrix(s.fixture_name + ".csv", fixture(s.fixture_name));
    } else {
        throw Error(ErrorKind::InvalidInput, "unknown --kind '" + s.kind + "'");
    }
    json spec{{"kind", s.kind}, {"seed", s.seed}};
    if (s.kind == "fixture") {
        spec["name"] = s.fixture_name;
    } else {
        spec["m"] = s.m;
        spec["n"] = s.n;
        spec["r"] = s.gen_rank;
        spec["noise_level"] = s.noise;
        if (s.kind == "completion") {
            spec["h_zero_fraction"] = s.h_zero;
            spec["missing_fraction"] = s.missing;
            spec["normalize_mean_to_one"] = !s.raw_scale;
            spec["dirichlet_alpha"] = s.dirichlet;
        }
    }
    ctx.text_file("spec.json", spec.dump(2) + "\n");
    out << "gen " << s.kind << ": wrote " << fs::absolute(s.out_dir).string() << '\n';
    return kExitOk;
}

int run_spa(const State& s, RunContext& ctx, std::ostream& out) {
    const Loaded d = load_input(s, ctx);
    RandSpaConfig cfg;
    cfg.rank = s.rank;
    cfg.nu = s.nu == 0 ? d.x.rows() : s.nu;
    cfg.kappa = s.kappa;
    cfg.runs = s.runs;
    cfg.seed = s.seed;
    const SelectionResult sel = randspa(d.x, cfg);
    ctx.indices("indices.tsv", sel.indices);
    ctx.matrix("W.csv", select_columns(d.x, sel.indices));
    ctx.matrix("H.csv", sel.h);
    ctx.status({{"relative_error", sel.relative_error}, {"nnls_converged", sel.nnls_converged}});
    out << "spa: relative error " << sel.relative_error << '\n';
    return kExitOk;
}

int run_bssmf(const State& s, RunContext& ctx, std::ostream& out) {
    const Loaded d = load_input(s, ctx);
    BssmfProblem p{d.x, d.mask, {}, parse_centering(s.centering)};
    if (s.bounds == "auto") {
        p.bounds = BssmfProblem::auto_bounds(d.x, d.mask ? &*d.mask : nullptr);
    } else {
        const auto comma = s.bounds.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument(s.bounds);
            p.bounds = Bounds::uniform(d.x.rows(), std::stod(s.bounds.substr(0, comma)),
                                       std::stod(s.bounds.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::InvalidInput, "--bounds expects 'auto' or 'LOWER,UPPER'");
        }
    }
    const FitResult r = bssmf_best_of(p, solver_options(s), s.runs);
    write_factors(s, ctx, r);
    out << "bssmf: relative error "
        << relative_error(d.x, r.factors.w, r.factors.h, d.mask ? &*d.mask : nullptr) << '\n';
    return fit_exit(r);
}

int run_minvol(const State& s, RunContext& ctx, std::ostream& out, bool complete) {
    const Loaded d = load_input(s, ctx);
    const std::size_t warm_iters = complete ? s.complete_warm_start_iters : s.warm_start_iters;
    if (complete && !d.mask) {
        throw Error(ErrorKind::InvalidInput, "minvol-complete needs --mask or nan cells read with --missing-nan");
    }
    const WeightedData data(d.x, d.mask ? &*d.mask : nullptr);
    MinvolModel model;
    model.variant = parse_minvol_variant(s.variant.empty() ? (complete ? "minvol_complete" : "minvol") : s.variant);
    model.delta = s.delta;
    model.autotune = s.autotune;

    const FactorPair f0 = warm_iters > 0 ? warm_start_nmf(data, s.rank, warm_iters, s.seed)
                                                 : minvol_random_init(data, s.rank, s.seed);
    if (model.variant != MinvolVariant::nmf_baseline) {
        model = init_hyperparams(data, f0, model);
        if (s.lambda > 0.0) model.lambda = s.lambda;
        if (s.gamma > 0.0) model.gamma = s.gamma;
    }
    const FitResult r = minvol_fit(data, model, solver_options(s), f0);
    write_factors(s, ctx, r);
    if (complete) ctx.matrix("X_completed.csv", matmul(r.factors.w, r.factors.h));
    out << to_string(model.variant) << ": relative error on observed entries "
        << relative_error(d.x, r.factors.w, r.factors.h, d.mask ? &*d.mask : nullptr) << '\n';
    return fit_exit(r);
}

int run_maxvol(const State& s, RunContext& ctx, std::ostream& out, bool normalized) {
    const Loaded d = load_input(s, ctx);
    MaxvolModel model;
    model.lambda = s.mv_lambda;
    model.delta = normalized ? s.nmv_delta : s.mv_delta;
    model.normalized = normalized;
    model.algorithm = parse_maxvol_algorithm(s.algo);
    model.rho = s.rho;
    const FitResult r = maxvol_best_of(d.x, model, solver_options(s), s.runs);
    write_factors(s, ctx, r);
    out << (normalized ? "nmaxvol" : "maxvol") << ": relative error "
        << relative_error(d.x, r.factors.w, r.factors.h) << '\n';
    return fit_exit(r);
}

int run_ssc(const State& s, RunContext& ctx, std::ostream& out) {
    const Loaded d = load_input(s, ctx);
    const SscReport rep = check_ssc1_necessary(d.x, s.tol);
    std::ostringstream tsv;
    tsv << "row\tzero_count\tcorner_in_cone\tcorner_residual\n";
    for (std::size_t i = 0; i < rep.row_zero_counts.size(); ++i) {
        tsv << i << '\t' << rep.row_zero_counts[i] << '\t' << (rep.corner_membership[i] ? 1 : 0) << '\t'
            << rep.corner_residuals[i] << '\n';
    }
    tsv << "# row_sparsity_ok\t" << (rep.row_sparsity_ok ? 1 : 0) << "\n# necessary_ok\t"
        << (rep.necessary_ok ? 1 : 0) << '\n';
    ctx.text_file("ssc.tsv", tsv.str());
    ctx.status({{"row_sparsity_ok", rep.row_sparsity_ok}, {"necessary_ok", rep.necessary_ok}});
    out << tsv.str();
    return kExitOk;
}

std::vector<std::string> replay_args(const json& manifest, const std::string& out_dir) {
    std::vector<std::string> args{manifest.at("subcommand").get<std::string>()};
    for (const auto& [key, value] : manifest.at("options").items()) {
        if (key == "out-dir") continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_string()) {
            if (value.get<std::string>().empty()) continue;
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back("--" + key);
            args.push_back(value.dump());
        }
    }
    args.push_back("--out-dir");
    args.push_back(out_dir);
    return args;
}

int run_replay(const State& s, std::ostream& out, std::ostream& err) {
    json manifest;
    {
        std::ifstream in(s.manifest, std::ios::binary);
        if (!in) throw Error(ErrorKind::IoError, "cannot read " + s.manifest);
        try {
            manifest = json::parse(in);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidInput, std::string("manifest is not valid JSON: ") + e.what());
        }
    }
    const int code = cli_dispatch(replay_args(manifest, s.out_dir), out, err);
    if (code != manifest.value("exit_code", 0)) {
        err << "replay: exit code " << code << " differs from recorded " << manifest.value("exit_code", 0) << '\n';
        return kExitFailure;
    }
    bool identical = true;
    for (const json& o : manifest.at("outputs")) {
        if (!o.value("deterministic", true)) continue;
        const fs::path p = fs::path(s.out_dir) / o.at("path").get<std::string>();
        const std::string now = fs::exists(p) ? hex64(fnv1a_file(p)) : std::string("missing");
        const bool same = now == o.at("fnv1a").get<std::string>();
        identical = identical && same;
        out << (same ? "identical " : "differs   ") << o.at("path").get<std::string>() << '\n';
    }
    return identical ? kExitOk : kExitFailure;
}

void add_shared(Recorder& r, State& s, bool with_mask) {
    r.path("input", s.input, "input matrix (CSV)")->required();
    if (with_mask) {
        r.path("mask", s.mask, "observation mask (CSV of 0/1)");
        r.flag("missing-nan", s.missing_nan, "treat nan cells of the input as missing");
    }
    r.option("rank", s.rank, "factorization rank")->required();
    r.option("seed", s.seed, "random seed");
    r.option("out-dir", s.out_dir, "output directory");
}

void add_iterative(Recorder& r, State& s) {
    r.option("outer", s.outer, "outer iterations");
    r.option("inner", s.inner, "inner iterations per block");
    r.flag("trace", s.trace, "write trace.tsv");
    r.option("maps", s.maps, "write one PGM abundance map per row of H, WIDTHxHEIGHT");
    r.option("runs", s.runs, "random starts; the lowest final objective is kept");
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Stopwatch clock;
    State s;
    CLI::App app{"Volume-regularized structured matrix factorization", "volmf"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", kVersion);

    std::vector<std::unique_ptr<Recorder>> recorders;
    auto sub = [&](const std::string& name, const std::string& desc) -> Recorder& {
        recorders.push_back(std::make_unique<Recorder>(app.add_subcommand(name, desc)));
        return *recorders.back();
    };

    Recorder& gen = sub("gen", "generate synthetic data or a named fixture");
    gen.option("kind", s.kind, "completion | separable | fixture")
        ->check(CLI::IsMember({"completion", "separable", "fixture"}));
    gen.option("name", s.fixture_name, "fixture name (with --kind fixture)")->check(CLI::IsMember(fixture_names()));
    gen.option("m", s.m, "rows");
    gen.option("n", s.n, "columns");
    gen.option("rank", s.gen_rank, "rank of the generating factors");
    gen.option("h-zero", s.h_zero, "fraction of zero entries in H (completion)");
    gen.option("missing", s.missing, "fraction of hidden entries (completion)");
    gen.option("noise", s.noise, "noise level");
    gen.option("dirichlet", s.dirichlet, "draw H columns from Dirichlet(alpha) when > 0 (completion)");
    gen.flag("raw-scale", s.raw_scale, "skip the rescaling to mean one (completion)");
    gen.option("seed", s.seed, "random seed");
    gen.option("out-dir", s.out_dir, "output directory");

    Recorder& spa = sub("spa", "successive projection / randomized SPA column selection");
    add_shared(spa, s, false);
    spa.option("nu", s.nu, "columns of the random Q; 0 means m");
    spa.option("kappa", s.kappa, "condition number of QQᵀ");
    spa.option("runs", s.runs, "randomized runs; the smallest relative error is kept");

    Recorder& bss = sub("bssmf", "bounded simplex-structured matrix factorization");
    add_shared(bss, s, true);
    add_iterative(bss, s);
    bss.option("bounds", s.bounds, "'auto' (row min and max) or LOWER,UPPER");
    bss.option("centering", s.centering, "none | global | row-wise");

    Recorder* mv_subs[2] = {&sub("minvol", "minimum-volume NMF"),
                            &sub("minvol-complete", "minimum-volume matrix completion")};
    for (int k = 0; k < 2; ++k) {
        Recorder& r = *mv_subs[k];
        add_shared(r, s, true);
        add_iterative(r, s);
        r.option("variant", s.variant, "minvol | minvol_complete | new_minvol | nmf");
        r.option("lambda", s.lambda, "volume weight; 0 picks it from the initial point");
        r.option("delta", s.delta, "logdet shift");
        r.option("gamma", s.gamma, "H penalty of new_minvol; 0 picks it from the initial point");
        r.flag("autotune", s.autotune, "rebalance lambda and gamma when progress stalls");
        r.option("warm-start-iters", k == 0 ? s.warm_start_iters : s.complete_warm_start_iters,
                 "NMF iterations used to initialize; 0 uses a random start");
    }

    Recorder& mx = sub("maxvol", "maximum-volume NMF");
    add_shared(mx, s, false);
    add_iterative(mx, s);
    mx.option("lambda", s.mv_lambda, "volume weight");
    mx.option("delta", s.mv_delta, "logdet shift");
    mx.option("rho", s.rho, "ADMM penalty");
    mx.option("algo", s.algo, "adgrad | admm | admm-adgrad")
        ->check(CLI::IsMember({"adgrad", "admm", "admm-bregman", "admm-adgrad"}));

    Recorder& nmx = sub("nmaxvol", "normalized maximum-volume NMF");
    add_shared(nmx, s, false);
    add_iterative(nmx, s);
    nmx.option("lambda", s.mv_lambda, "volume weight");
    nmx.option("delta", s.nmv_delta, "logdet shift");

    Recorder& ssc = sub("ssc-check", "necessary conditions for a sufficiently scattered H");
    ssc.path("input", s.input, "H (CSV)")->required();
    ssc.option("tol", s.tol, "relative zero and residual tolerance");
    ssc.option("out-dir", s.out_dir, "output directory");

    Recorder& rep = sub("replay", "rerun a manifest and compare output hashes");
    rep.path("manifest", s.manifest, "manifest.json of an earlier run")->required();
    rep.option("out-dir", s.out_dir, "directory for the rerun's outputs")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
    }

    const Recorder* chosen = nullptr;
    for (const auto& r : recorders) {
        if (r->app()->parsed()) chosen = r.get();
    }
    const std::string name = chosen->app()->get_name();
    try {
        if (name == "replay") return run_replay(s, out, err);
        RunContext ctx(name, s, chosen->resolved());
        int code = kExitOk;
        if (name == "gen") code = run_gen(s, ctx, out);
        else if (name == "spa") code = run_spa(s, ctx, out);
        else if (name == "bssmf") code = run_bssmf(s, ctx, out);
        else if (name == "minvol") code = run_minvol(s, ctx, out, false);
        else if (name == "minvol-complete") code = run_minvol(s, ctx, out, true);
        else if (name == "maxvol") code = run_maxvol(s, ctx, out, false);
        else if (name == "nmaxvol") code = run_maxvol(s, ctx, out, true);
        else if (name == "ssc-check") code = run_ssc(s, ctx, out);
        ctx.write_manifest(code, clock.seconds());
        if (code == kExitNumerical) err << name << ": numerical failure, see manifest.json status\n";
        return code;
    } catch (const Error& e) {
        err << name << ": " << e.what() << '\n';
        return is_numerical(e.kind()) ? kExitNumerical : kExitInvalid;
    } catch (const fs::filesystem_error& e) {
        err << name << ": " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << name << ": unexpected error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cli_dispatch(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace volmf
