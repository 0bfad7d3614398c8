#include "skolem/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include "skolem/learner.hpp"
#include "skolem/preprocess.hpp"
#include "skolem/qdimacs.hpp"
#include "skolem/solver.hpp"

namespace skolem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::optional<Clock::time_point> make_deadline(const RunConfig& cfg) {
    if (cfg.timeout_seconds <= 0) return std::nullopt;
    return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(cfg.timeout_seconds));
}

bool past(const std::optional<Clock::time_point>& deadline) {
    return deadline && Clock::now() > *deadline;
}

void harvest(RunRecord& rec, const Refiner& refiner) {
    rec.refine_counts = refiner.stats().refine_count;
    rec.self_substituted = refiner.stats().self_substituted;
    rec.convergence_violations = refiner.stats().convergence_violations;
}

}  // namespace

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::SolvedPreprocess: return "solved-preprocess";
        case RunStatus::SolvedLearn: return "solved-learn";
        case RunStatus::SolvedRefine: return "solved-refine";
        case RunStatus::Failed: return "failed";
        case RunStatus::Timeout: return "timeout";
    }
    return "?";
}

uint64_t derive_instance_seed(uint64_t master_seed, const std::string& name) {
    uint64_t h = 1469598103934665603ull ^ master_seed;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h == 0 ? 1 : h;
}

SynthesisResult synthesize(const QbfSpec& spec, ExprArena& arena, const RunConfig& cfg,
                           const std::string& instance_name) {
    SynthesisResult res;
    RunRecord& rec = res.record;
    rec.instance = instance_name;
    rec.num_x = static_cast<int>(spec.x_vars.size());
    rec.num_y = static_cast<int>(spec.y_vars.size());

    auto t_total = Clock::now();
    auto deadline = make_deadline(cfg);
    auto fail = [&](RunStatus st, const std::string& why) {
        rec.status = st;
        rec.failure_reason = why;
        rec.total_s = seconds_since(t_total);
        return res;
    };

    // Phase 1: unates.
    auto t0 = Clock::now();
    PreprocessLimits plim{cfg.conflict_budget, deadline};
    PreprocessResult pre = preprocess(spec, arena, cfg.diag, plim);
    rec.preprocess_s = seconds_since(t0);
    if (past(deadline)) return fail(RunStatus::Timeout, "timeout in preprocessing");

    std::map<Var, ExprRef> psi = pre.psi;
    QbfSpec reduced = spec;
    reduced.matrix = pre.report.reduced_matrix;

    std::set<Var> unates;
    for (Var v : pre.report.positive) unates.insert(v);
    for (Var v : pre.report.negative) unates.insert(v);

    RefinerLimits rlim{cfg.conflict_budget, deadline};
    std::map<Var, size_t> tree_nodes;
    DependencySets deps;

    if (unates.size() < spec.y_vars.size()) {
        // Phase 2: samples.
        t0 = Clock::now();
        SamplerConfig scfg;
        scfg.n_probe = cfg.probe_n;
        scfg.nj_mode = cfg.nj_mode;
        scfg.force_cdcl = cfg.force_cdcl_sampling;
        scfg.conflict_budget = cfg.conflict_budget;
        int n = cfg.samples >= 0 ? cfg.samples : default_sample_count(spec.y_vars.size());
        GetSamplesResult samples = get_samples(reduced, n, scfg, cfg.seed);
        rec.sampling_s = seconds_since(t0);
        if (past(deadline)) return fail(RunStatus::Timeout, "timeout in sampling");

        // Phase 3: candidates.
        t0 = Clock::now();
        if (samples.unsat) {
            if (cfg.diag) *cfg.diag << "specification matrix is unsatisfiable; using constant candidates\n";
            for (Var y : spec.y_vars) {
                if (unates.count(y)) continue;
                psi[y] = arena.const0();
                tree_nodes[y] = 1;
            }
        } else {
            Hyperparams h;
            h.min_impurity_decrease = cfg.min_impurity_decrease;
            for (Var y : spec.y_vars) {
                if (unates.count(y)) continue;
                CandidateResult c = candidate_skf(samples.samples, spec, y, deps, arena, h, unates);
                psi[y] = c.psi;
                tree_nodes[y] = c.tree_nodes;
            }
        }
        rec.learning_s = seconds_since(t0);
        if (past(deadline)) return fail(RunStatus::Timeout, "timeout in learning");
    }

    std::vector<Var> total_order = find_order(deps, spec.y_vars);

    // Phase 4: verify / refine against the reduced matrix.
    t0 = Clock::now();
    RefinerConfig rcfg;
    rcfg.self_sub_threshold = cfg.self_sub_threshold;
    rcfg.localization = cfg.localization;
    rcfg.reverse_maxsat_tie_break = cfg.reverse_maxsat_tie_break;
    rcfg.gk_primed_yhat = cfg.gk_primed_yhat;
    rcfg.limits = rlim;
    rcfg.seed = cfg.seed;
    Refiner refiner(reduced, arena, psi, total_order, tree_nodes, rcfg, cfg.diag, cfg.diag_json);

    for (;;) {
        if (past(deadline)) {
            rec.refinement_s = seconds_since(t0);
            harvest(rec, refiner);
            return fail(RunStatus::Timeout, "timeout in refinement");
        }
        VerifyResult v = verify(reduced, arena, psi, cfg.unprimed_error_formula, rlim);
        if (v.status == VerifyStatus::Valid) break;
        if (v.status == VerifyStatus::Unknown) {
            rec.refinement_s = seconds_since(t0);
            harvest(rec, refiner);
            return fail(past(deadline) ? RunStatus::Timeout : RunStatus::Failed,
                        "verification budget exhausted");
        }
        if (rec.refinement_iterations >= cfg.iteration_cap) {
            rec.refinement_s = seconds_since(t0);
            harvest(rec, refiner);
            return fail(RunStatus::Failed, "refinement iteration cap reached");
        }
        ++rec.refinement_iterations;
        RefineStatus rs;
        try {
            rs = refiner.refine_skf(v.sigma, v.bundle.prime_map, rec.refinement_iterations);
        } catch (const std::exception& e) {
            rec.refinement_s = seconds_since(t0);
            harvest(rec, refiner);
            return fail(past(deadline) ? RunStatus::Timeout : RunStatus::Failed, e.what());
        }
        if (rs != RefineStatus::Progress) {
            rec.refinement_s = seconds_since(t0);
            harvest(rec, refiner);
            return fail(RunStatus::Failed, "refinement made no progress");
        }
    }

    // Back-substitution, then the independent gate: the X-only vector must
    // pass a fresh check against the original matrix.
    try {
        substitute_all(arena, psi, total_order);
    } catch (const std::exception& e) {
        rec.refinement_s = seconds_since(t0);
        harvest(rec, refiner);
        return fail(RunStatus::Failed, e.what());
    }
    VerifyResult final_check = verify(spec, arena, psi, cfg.unprimed_error_formula, rlim);
    rec.refinement_s = seconds_since(t0);
    harvest(rec, refiner);
    if (final_check.status != VerifyStatus::Valid)
        return fail(RunStatus::Failed, "final re-verification of substituted functions failed");

    rec.status = unates.size() == spec.y_vars.size() ? RunStatus::SolvedPreprocess
                 : rec.refinement_iterations == 0    ? RunStatus::SolvedLearn
                                                     : RunStatus::SolvedRefine;
    rec.total_s = seconds_since(t_total);
    res.psi = std::move(psi);
    return res;
}

VerifyFunctionsResult verify_functions(const QbfSpec& spec, ExprArena& arena,
                                       const std::map<Var, ExprRef>& psi, const RunConfig& cfg) {
    RefinerLimits lim{cfg.conflict_budget, make_deadline(cfg)};
    VerifyResult v = verify(spec, arena, psi, cfg.unprimed_error_formula, lim);
    VerifyFunctionsResult out;
    out.valid = v.status == VerifyStatus::Valid;
    out.unknown = v.status == VerifyStatus::Unknown;
    out.counterexample = std::move(v.sigma);
    out.prime_map = std::move(v.bundle.prime_map);
    return out;
}

std::vector<RunRecord> bench_dir(const std::string& dir, const RunConfig& cfg, int jobs) {
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".qdimacs")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());

    std::vector<RunRecord> records(files.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            std::string name = std::filesystem::path(files[i]).filename().string();
            RunConfig icfg = cfg;
            icfg.seed = derive_instance_seed(cfg.seed, name);
            try {
                QbfSpec spec = parse_qdimacs_file(files[i]);
                ExprArena arena;
                records[i] = synthesize(spec, arena, icfg, name).record;
            } catch (const std::exception& e) {
                records[i].instance = name;
                records[i].status = RunStatus::Failed;
                records[i].failure_reason = e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

void write_bench_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << "instance,num_x,num_y,status,refinement_iterations,refine_counts,self_substituted,"
           "convergence_violations,failure_reason,preprocess_s,sampling_s,learning_s,refinement_s,"
           "total_s,cumulative_s\n";
    double cum = 0.0;
    for (const RunRecord& r : records) {
        std::ostringstream counts, selfsub;
        bool first = true;
        for (const auto& [y, c] : r.refine_counts) {
            if (c == 0) continue;
            counts << (first ? "" : ";") << 'y' << y << ':' << c;
            first = false;
        }
        first = true;
        for (Var y : r.self_substituted) {
            selfsub << (first ? "" : ";") << 'y' << y;
            first = false;
        }
        cum += r.total_s;
        out << r.instance << ',' << r.num_x << ',' << r.num_y << ',' << to_string(r.status) << ','
            << r.refinement_iterations << ',' << counts.str() << ',' << selfsub.str() << ','
            << r.convergence_violations << ',' << r.failure_reason << ',' << r.preprocess_s << ','
            << r.sampling_s << ',' << r.learning_s << ',' << r.refinement_s << ',' << r.total_s
            << ',' << cum << '\n';
    }
}

void write_bench_summary(const std::vector<RunRecord>& records, std::ostream& out) {
    int pre = 0, learn = 0, refine = 0, failed = 0, timeout = 0;
    for (const RunRecord& r : records) {
        switch (r.status) {
            case RunStatus::SolvedPreprocess: ++pre; break;
            case RunStatus::SolvedLearn: ++learn; break;
            case RunStatus::SolvedRefine: ++refine; break;
            case RunStatus::Failed: ++failed; break;
            case RunStatus::Timeout: ++timeout; break;
        }
    }
    out << "instances " << records.size() << '\n'
        << "solved-preprocess " << pre << '\n'
        << "solved-learn " << learn << '\n'
        << "solved-refine " << refine << '\n'
        << "solved " << pre + learn + refine << '\n'
        << "failed " << failed << '\n'
        << "timeout " << timeout << '\n';
}

}  // namespace skolem
