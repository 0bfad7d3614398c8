#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "skolem/pipeline.hpp"
#include "skolem/qdimacs.hpp"
#include "skolem/skf_text.hpp"

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitFailure = 2;
constexpr int kExitUsage = 3;

struct CliOptions {
    std::string input;
    std::string samples = "auto";
    double min_impurity_decrease = 0.005;
    int probe_n = 500;
    int self_sub_threshold = 10;
    uint64_t seed = 1;
    int64_t conflict_budget = 10'000'000;
    int iteration_cap = 5000;
    double timeout = 0.0;
    std::string nj_mode = "sigma2";
    std::string out_path;
    std::string diag_path;
    bool verbose = false;
};

skolem::RunConfig to_run_config(const CliOptions& o, std::ofstream& diag_json_file) {
    skolem::RunConfig cfg;
    if (o.samples != "auto") cfg.samples = std::stoi(o.samples);
    cfg.min_impurity_decrease = o.min_impurity_decrease;
    cfg.probe_n = o.probe_n;
    cfg.self_sub_threshold = o.self_sub_threshold;
    cfg.seed = o.seed;
    cfg.conflict_budget = o.conflict_budget;
    cfg.iteration_cap = o.iteration_cap;
    cfg.timeout_seconds = o.timeout;
    cfg.nj_mode = o.nj_mode == "sigma1" ? skolem::NjMode::Sigma1 : skolem::NjMode::Sigma2;
    if (o.verbose) cfg.diag = &std::cerr;
    if (!o.diag_path.empty()) {
        diag_json_file.open(o.diag_path);
        if (!diag_json_file) throw CLI::ValidationError("--diag", "cannot open " + o.diag_path);
        cfg.diag_json = &diag_json_file;
    }
    return cfg;
}

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--samples", o.samples, "training sample count, or 'auto' for |Y|-tiered")
        ->envname("SKOLEM_SAMPLES");
    cmd->add_option("--min-impurity-decrease", o.min_impurity_decrease,
                    "decision-tree stopping threshold")
        ->envname("SKOLEM_MIN_IMPURITY_DECREASE");
    cmd->add_option("--probe-n", o.probe_n, "probe draw size per bias")->envname("SKOLEM_PROBE_N");
    cmd->add_option("--self-sub-threshold", o.self_sub_threshold,
                    "refinement count before self-substitution")
        ->envname("SKOLEM_SELF_SUB_THRESHOLD");
    cmd->add_option("--seed", o.seed, "master RNG seed")->envname("SKOLEM_SEED");
    cmd->add_option("--conflict-budget", o.conflict_budget, "solver conflicts per query")
        ->envname("SKOLEM_CONFLICT_BUDGET");
    cmd->add_option("--iteration-cap", o.iteration_cap, "max verify/refine rounds")
        ->envname("SKOLEM_ITERATION_CAP");
    cmd->add_option("--timeout", o.timeout, "wall-clock seconds, 0 = none")
        ->envname("SKOLEM_TIMEOUT");
    cmd->add_option("--nj-mode", o.nj_mode, "probe statistic source: sigma2 or sigma1")
        ->check(CLI::IsMember({"sigma2", "sigma1"}))
        ->envname("SKOLEM_NJ_MODE");
    cmd->add_flag("-v,--verbose", o.verbose, "diagnostic lines on stderr");
}

int run_synth(const CliOptions& o) {
    if (!std::filesystem::exists(o.input)) {
        std::cerr << "no such file: " << o.input << '\n';
        return kExitUsage;
    }
    skolem::QbfSpec spec = skolem::parse_qdimacs_file(o.input);
    std::ofstream diag_json;
    skolem::RunConfig cfg = to_run_config(o, diag_json);
    skolem::ExprArena arena;
    auto res = skolem::synthesize(spec, arena, cfg, o.input);

    std::cerr << "status: " << skolem::to_string(res.record.status);
    if (!res.record.failure_reason.empty()) std::cerr << " (" << res.record.failure_reason << ")";
    std::cerr << "\nrefinement iterations: " << res.record.refinement_iterations << '\n';

    if (!res.record.solved()) return kExitFailure;
    if (o.out_path.empty()) {
        skolem::write_skolem(spec, arena, res.psi, std::cout);
    } else {
        std::ofstream out(o.out_path);
        if (!out) {
            std::cerr << "cannot open " << o.out_path << '\n';
            return kExitFailure;
        }
        skolem::write_skolem(spec, arena, res.psi, out);
    }
    return kExitSolved;
}

int run_verify(const std::string& spec_path, const std::string& skf_path) {
    if (!std::filesystem::exists(spec_path)) {
        std::cerr << "no such file: " << spec_path << '\n';
        return kExitUsage;
    }
    skolem::QbfSpec spec = skolem::parse_qdimacs_file(spec_path);
    std::ifstream skf(skf_path);
    if (!skf) {
        std::cerr << "cannot open " << skf_path << '\n';
        return kExitUsage;
    }
    skolem::ExprArena arena;
    auto psi = skolem::parse_skolem(skf, spec, arena);
    auto res = skolem::verify_functions(spec, arena, psi);
    if (res.unknown) {
        std::cerr << "unknown: solver budget exhausted\n";
        return kExitFailure;
    }
    if (res.valid) {
        std::cout << "valid\n";
        return kExitSolved;
    }
    std::cout << "invalid\ncounterexample:";
    for (skolem::Var x : spec.x_vars)
        std::cout << ' ' << 'x' << x << '=' << res.counterexample.value(x);
    for (skolem::Var y : spec.y_vars)
        std::cout << ' ' << 'y' << y << '=' << res.counterexample.value(y);
    std::cout << '\n';
    return kExitInvalid;
}

int run_bench(const std::string& dir, const CliOptions& o, int jobs, const std::string& csv_path) {
    if (!std::filesystem::is_directory(dir)) {
        std::cerr << "no such directory: " << dir << '\n';
        return kExitUsage;
    }
    std::ofstream diag_json;
    skolem::RunConfig cfg = to_run_config(o, diag_json);
    auto records = skolem::bench_dir(dir, cfg, jobs);
    if (csv_path.empty()) {
        skolem::write_bench_csv(records, std::cout);
    } else {
        std::ofstream out(csv_path);
        if (!out) {
            std::cerr << "cannot open " << csv_path << '\n';
            return kExitFailure;
        }
        skolem::write_bench_csv(records, out);
    }
    skolem::write_bench_summary(records, std::cerr);
    return kExitSolved;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skolem function synthesis for 2-QBF specifications"};
    app.require_subcommand(1);

    CliOptions o;

    auto* synth = app.add_subcommand("synth", "synthesize functions from a QDIMACS file");
    synth->add_option("file", o.input, "QDIMACS input")->required();
    add_common_flags(synth, o);
    synth->add_option("--out", o.out_path, "write functions here instead of stdout");
    synth->add_option("--diag", o.diag_path, "JSON-lines refinement log");

    std::string verify_spec, verify_skf;
    auto* verify = app.add_subcommand("verify", "certify a function file against a specification");
    verify->add_option("spec", verify_spec, "QDIMACS input")->required();
    verify->add_option("functions", verify_skf, "Skolem function file")->required();

    std::string bench_dir_path, csv_path;
    int jobs = 1;
    auto* bench = app.add_subcommand("bench", "run every .qdimacs in a directory");
    bench->add_option("dir", bench_dir_path, "benchmark directory")->required();
    bench->add_option("--jobs", jobs, "parallel workers")->envname("SKOLEM_JOBS");
    bench->add_option("--csv", csv_path, "CSV output path");
    add_common_flags(bench, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(o);
        if (verify->parsed()) return run_verify(verify_spec, verify_skf);
        if (bench->parsed()) return run_bench(bench_dir_path, o, jobs, csv_path);
    } catch (const skolem::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const skolem::SkfFormatError& e) {
        std::cerr << "function file error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
