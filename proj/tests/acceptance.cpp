// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Criterion 10 drives the installed CLI when its path is passed as argv[1];
// fixtures are read from argv[2] (falls back to SKOLEM_TEST_DIR).

#include <chrono>
#include <climits>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracle.hpp"
#include "skolem/learner.hpp"
#include "skolem/maxsat.hpp"
#include "skolem/pipeline.hpp"
#include "skolem/preprocess.hpp"
#include "skolem/qdimacs.hpp"
#include "skolem/sampler.hpp"
#include "skolem/skf_text.hpp"

using namespace skolem;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id = 0;
    std::string name;
    bool pass = true;
    std::ostringstream detail;
    double seconds = 0;
};

using Clock = std::chrono::steady_clock;

std::string g_cli_path;
std::string g_test_dir;

// Shared across criteria 2, 8 and 9.
struct SuiteTotals {
    long iters_maxsat = 0;
    long iters_naive = 0;
    long violations = 0;
    long cap_failures = 0;
    bool populated = false;
};
SuiteTotals g_suite;

RunConfig suite_cfg(uint64_t seed) {
    RunConfig cfg;
    cfg.samples = 200;
    cfg.probe_n = 100;
    cfg.seed = seed;
    return cfg;
}

void check(Criterion& c, bool ok, const std::string& what) {
    if (!ok) {
        c.pass = false;
        c.detail << (c.detail.str().empty() ? "" : "; ") << what;
    }
}

// ---- criterion 1: golden example ----------------------------------------

void criterion_golden(Criterion& c) {
    QbfSpec spec = parse_qdimacs_file(g_test_dir + "/fixtures/example1.qdimacs");

    ExprArena ar;
    std::ostringstream diag;
    RunConfig cfg = suite_cfg(1);
    cfg.diag = &diag;
    SynthesisResult r = synthesize(spec, ar, cfg, "example1");
    check(c, r.record.solved(), "example1 did not solve");
    check(c, diag.str().find("unate +y5") != std::string::npos,
          "y3 (var 5) not detected positive unate");
    if (r.record.solved())
        check(c, verify_functions(spec, ar, r.psi).valid, "final vector failed verification");

    // Forced poor candidate: psi1 = x1; one refinement round must land on a
    // function equivalent to x1 or x2 over the four input points.
    ExprArena ar2;
    std::map<Var, ExprRef> psi{{3, ar2.var(1)}, {4, ar2.var(1)}, {5, ar2.const1()}};
    VerifyResult v = verify(spec, ar2, psi);
    check(c, v.status == VerifyStatus::Counterexample, "forced candidate unexpectedly valid");
    if (v.status == VerifyStatus::Counterexample) {
        Refiner refiner(spec, ar2, psi, {3, 4, 5}, {}, {});
        Assignment sigma = v.sigma;
        RefineStatus rs = refiner.refine_skf(sigma, v.bundle.prime_map, 1);
        check(c, rs == RefineStatus::Progress, "refinement made no progress");
        bool equivalent = true;
        for (const Assignment& a : oracle::all_assignments({1, 2})) {
            Assignment full = a;
            full.set(4, false);
            full.set(5, false);
            if (oracle::eval_expr_naive(ar2, psi.at(3), full) != (a.value(1) || a.value(2)))
                equivalent = false;
        }
        check(c, equivalent, "repaired psi1 not equivalent to x1|x2");
        check(c, verify(spec, ar2, psi).status == VerifyStatus::Valid,
              "vector invalid after one refinement round");
    }
}

// ---- criterion 2 (+ data for 8 and 9) ------------------------------------

void run_shared_suite(Criterion& c2) {
    std::mt19937_64 rng(2020);
    int verdict_matches = 0;
    const int kInstances = 200;
    for (int t = 0; t < kInstances; ++t) {
        int nx = 2 + static_cast<int>(rng() % 4);  // 2..5
        int ny = 1 + static_cast<int>(rng() % 4);  // 1..4
        if (t % 7 == 0) {
            nx = 5 + static_cast<int>(rng() % 3);
            ny = 3 + static_cast<int>(rng() % 2);
        }
        QbfSpec spec = oracle::planted_spec(rng, nx, ny);  // |X|+|Y| <= 14

        // (a) full pipeline, maxsat localization
        {
            ExprArena ar;
            SynthesisResult r = synthesize(spec, ar, suite_cfg(t + 1), "suite");
            check(c2, r.record.solved(), "instance " + std::to_string(t) + " unsolved");
            if (r.record.solved())
                check(c2, verify_functions(spec, ar, r.psi).valid,
                      "solved instance " + std::to_string(t) + " fails re-verification");
            g_suite.iters_maxsat += r.record.refinement_iterations;
            g_suite.violations += r.record.convergence_violations;
            if (!r.record.solved() && r.record.failure_reason.find("cap") != std::string::npos)
                ++g_suite.cap_failures;
        }
        // (b) same instance under naive localization, for the ablation
        {
            ExprArena ar;
            RunConfig cfg = suite_cfg(t + 1);
            cfg.localization = LocalizationMode::NaiveDisagree;
            SynthesisResult r = synthesize(spec, ar, cfg, "suite-naive");
            g_suite.iters_naive += r.record.refinement_iterations;
            g_suite.violations += r.record.convergence_violations;
            if (!r.record.solved() && r.record.failure_reason.find("cap") != std::string::npos)
                ++g_suite.cap_failures;
        }
        // (c) verify verdict vs exhaustive oracle on a random X-only vector
        {
            ExprArena ar;
            std::map<Var, ExprRef> cand;
            for (Var y : spec.y_vars) cand[y] = oracle::random_expr(rng, ar, spec.x_vars, 2);
            VerifyResult v = verify(spec, ar, cand);
            bool oracle_valid = oracle::skolem_valid_naive(spec, ar, cand, spec.y_vars);
            if ((v.status == VerifyStatus::Valid) == oracle_valid) ++verdict_matches;
        }
    }
    check(c2, verdict_matches == kInstances,
          "verdict agreement " + std::to_string(verdict_matches) + "/200");
    g_suite.populated = true;
}

// ---- criterion 3: unate oracle --------------------------------------------

void criterion_unate(Criterion& c) {
    std::mt19937_64 rng(303);
    int agree = 0;
    const int kCases = 200;
    for (int t = 0; t < kCases; ++t) {
        Var n = 3 + static_cast<Var>(rng() % 8);  // <= 10 vars
        CnfFormula f = oracle::random_cnf(rng, n, 1 + static_cast<int>(rng() % (2 * n)), 3);
        Var y = 1 + static_cast<Var>(rng() % n);
        bool pos_impl = check_positive_unate(f, y) == UnateStatus::Yes;
        bool neg_impl = check_negative_unate(f, y) == UnateStatus::Yes;
        if (pos_impl == oracle::positive_unate_naive(f, y) &&
            neg_impl == oracle::negative_unate_naive(f, y))
            ++agree;
    }
    check(c, agree == kCases, "agreement " + std::to_string(agree) + "/200");

    // Per-pass ordering convention: replay sequential passes with the oracle.
    std::mt19937_64 rng2(304);
    for (int t = 0; t < 40; ++t) {
        Var nx = 2, ny = 1 + static_cast<Var>(rng2() % 3);
        QbfSpec s;
        for (Var v = 1; v <= nx; ++v) s.x_vars.push_back(v);
        for (Var v = nx + 1; v <= nx + ny; ++v) s.y_vars.push_back(v);
        s.matrix = oracle::random_cnf(rng2, nx + ny, 2 + static_cast<int>(rng2() % 6), 3);
        ExprArena ar;
        PreprocessResult r = preprocess(s, ar);
        CnfFormula cur = s.matrix;
        std::vector<Var> pos, neg;
        for (Var y : s.y_vars) {
            if (oracle::positive_unate_naive(cur, y)) {
                pos.push_back(y);
                cur = substitute_const(cur, y, 1);
            } else if (oracle::negative_unate_naive(cur, y)) {
                neg.push_back(y);
                cur = substitute_const(cur, y, 0);
            }
        }
        check(c, r.report.positive == pos && r.report.negative == neg,
              "sequential pass disagrees with oracle replay");
    }
}

// ---- criterion 4: maxsat optimality ----------------------------------------

void criterion_maxsat(Criterion& c) {
    std::mt19937_64 rng(404);
    int done = 0;
    while (done < 200) {
        Var n = 3 + static_cast<Var>(rng() % 10);  // <= 12 total vars
        CnfFormula hard = oracle::random_cnf(rng, n, 1 + static_cast<int>(rng() % n), 3);
        if (oracle::truth_table_models(hard).empty()) continue;
        MaxSatQuery q;
        q.hard = hard;
        std::vector<Lit> softs;
        int num_soft = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < num_soft; ++i) {
            Lit l(1 + static_cast<Var>(rng() % n), rng() & 1);
            q.soft.push_back({l, static_cast<Var>(1000 + i)});
            softs.push_back(l);
        }
        q.seed = done + 1;
        MaxSatResult r = maxsat(q);
        int expect = oracle::maxsat_optimum_naive(hard, softs);
        check(c, static_cast<int>(r.falsified.size()) == expect,
              "instance " + std::to_string(done) + ": got " + std::to_string(r.falsified.size()) +
                  " expected " + std::to_string(expect));
        ++done;
    }
}

// ---- criterion 5: learner fidelity ------------------------------------------

void criterion_learner(Criterion& c) {
    std::mt19937_64 rng(505);
    for (int t = 0; t < 50; ++t) {
        int nf = 3 + static_cast<int>(rng() % 8);  // up to 10 features
        std::vector<Var> features;
        for (int i = 1; i <= nf; ++i) features.push_back(i);
        ExprArena ar;
        ExprRef target = oracle::random_expr(rng, ar, features, 3);
        std::vector<std::vector<uint8_t>> rows;
        std::vector<uint8_t> labels;
        for (int r = 0; r < 120; ++r) {
            Assignment a;
            std::vector<uint8_t> row;
            for (Var v : features) {
                bool bit = rng() & 1;
                a.set(v, bit);
                row.push_back(bit);
            }
            rows.push_back(row);
            labels.push_back(oracle::eval_expr_naive(ar, target, a) ? 1 : 0);
        }
        Hyperparams h;
        h.min_impurity_decrease = 0.0;
        DecisionTree tree = build_tree(rows, features, labels, h);

        // training accuracy must be 1.0 on functionally consistent data
        bool acc = true;
        for (size_t i = 0; i < rows.size(); ++i) {
            auto value = [&](Var v) { return rows[i][v - 1] == 1; };
            if (tree.classify(value) != labels[i]) acc = false;
        }
        check(c, acc, "accuracy < 1.0 on consistent data");

        // extracted function replays the tree everywhere
        ExprRef f = tree.extract_function(ar);
        for (const Assignment& a : oracle::all_assignments(features)) {
            auto value = [&](Var v) { return a.value(v); };
            if (oracle::eval_expr_naive(ar, f, a) != (tree.classify(value) == 1)) {
                check(c, false, "extraction mismatch");
                break;
            }
        }
    }
}

// ---- criterion 6: sampler bias direction -------------------------------------

void criterion_sampler(Criterion& c) {
    QbfSpec s;
    s.x_vars = {1, 2};
    s.y_vars = {3};
    s.matrix.num_vars = 3;
    s.matrix.add_clause({Lit(1, false), Lit(2, false), Lit(3, false)});

    const double ref = 4.0 / 7.0;
    const double band = 0.029;  // 99% binomial halfwidth at n=2000
    SamplerConfig cfg;
    int good = 0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        BiasProfile low, high;
        low.q[3] = 0.1;
        high.q[3] = 0.9;
        double f_low = draw(s, low, 2000, seed, cfg).frequency(3, true);
        double f_high = draw(s, high, 2000, seed + 1000, cfg).frequency(3, true);
        if (f_low < ref - band && f_high > ref + band) ++good;
    }
    check(c, good >= 19, "bias direction held in only " + std::to_string(good) + "/20 repeats");
}

// ---- criterion 7: self-substitution trend --------------------------------------

QbfSpec parity_spec(int k) {
    // y <-> x1 xor ... xor xk, directly in CNF (2^k clauses).
    QbfSpec s;
    for (Var v = 1; v <= k; ++v) s.x_vars.push_back(v);
    Var y = k + 1;
    s.y_vars = {y};
    s.matrix.num_vars = y;
    for (uint32_t bits = 0; bits < (1u << k); ++bits) {
        // clause = negation of the input cube, plus the forced y literal
        std::vector<Lit> clause;
        int ones = 0;
        for (int i = 0; i < k; ++i) {
            bool b = (bits >> i) & 1;
            ones += b;
            clause.push_back(Lit(i + 1, b));
        }
        clause.push_back(Lit(y, (ones % 2) == 0));
        s.matrix.add_clause(std::move(clause));
    }
    return s;
}

void criterion_selfsub(Criterion& c) {
    QbfSpec s = parity_spec(8);
    RunConfig base = suite_cfg(11);
    base.samples = 400;

    ExprArena ar_with;
    SynthesisResult with_sub = synthesize(s, ar_with, base, "parity-selfsub");

    ExprArena ar_without;
    RunConfig without_cfg = base;
    without_cfg.self_sub_threshold = INT_MAX;
    SynthesisResult without_sub = synthesize(s, ar_without, without_cfg, "parity-plain");

    check(c, with_sub.record.solved(), "self-substitution run unsolved");
    check(c, without_sub.record.solved(), "plain run unsolved");
    check(c, !with_sub.record.self_substituted.empty(), "self-substitution never fired");
    if (with_sub.record.solved() && without_sub.record.solved()) {
        long a = with_sub.record.refinement_iterations;
        long b = without_sub.record.refinement_iterations;
        check(c, b >= 5 * a, "iterations " + std::to_string(b) + " (plain) vs " +
                                 std::to_string(a) + " (self-sub): less than 5x");
        g_suite.violations += with_sub.record.convergence_violations;
        g_suite.violations += without_sub.record.convergence_violations;
    }
}

// ---- criterion 8: localization ablation ------------------------------------------

void criterion_ablation(Criterion& c) {
    check(c, g_suite.populated, "shared suite missing");
    check(c, g_suite.iters_maxsat <= g_suite.iters_naive,
          "maxsat iterations " + std::to_string(g_suite.iters_maxsat) + " > naive " +
              std::to_string(g_suite.iters_naive));
    c.detail << (c.detail.str().empty() ? "" : "; ") << "maxsat=" << g_suite.iters_maxsat
             << " naive=" << g_suite.iters_naive;
}

// ---- criterion 9: convergence invariant --------------------------------------------

void criterion_convergence(Criterion& c) {
    check(c, g_suite.populated, "shared suite missing");
    check(c, g_suite.violations == 0,
          std::to_string(g_suite.violations) + " non-repetition violations");
    check(c, g_suite.cap_failures == 0,
          std::to_string(g_suite.cap_failures) + " iteration-cap failures");
}

// ---- criterion 10: bench determinism ---------------------------------------------------

std::string strip_time_columns(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        // the last six columns are the wall times plus the cumulative column
        for (size_t i = 0; i + 6 < cells.size(); ++i) out += cells[i] + ",";
        out += "\n";
    }
    return out;
}

void criterion_determinism(Criterion& c) {
    fs::path dir = fs::temp_directory_path() / "skolem_acceptance_bench";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::mt19937_64 rng(1001);
    for (int i = 0; i < 8; ++i) {
        QbfSpec s = oracle::planted_spec(rng, 2 + i % 3, 1 + i % 3);
        std::ofstream f(dir / ("bench" + std::to_string(i) + ".qdimacs"));
        serialize_qdimacs(s, f);
    }

    std::string csv1, csv2;
    if (!g_cli_path.empty()) {
        auto run = [&](const std::string& out) {
            std::string cmd = g_cli_path + " bench " + dir.string() +
                              " --seed 99 --samples 200 --probe-n 100 --csv " + out + " 2>/dev/null";
            return std::system(cmd.c_str()) == 0;
        };
        fs::path o1 = dir / "run1.csv", o2 = dir / "run2.csv";
        check(c, run(o1.string()), "cli bench run 1 failed");
        check(c, run(o2.string()), "cli bench run 2 failed");
        std::ostringstream s1, s2;
        s1 << std::ifstream(o1).rdbuf();
        s2 << std::ifstream(o2).rdbuf();
        csv1 = s1.str();
        csv2 = s2.str();
    } else {
        RunConfig cfg = suite_cfg(99);
        std::ostringstream s1, s2;
        write_bench_csv(bench_dir(dir.string(), cfg, 1), s1);
        write_bench_csv(bench_dir(dir.string(), cfg, 1), s2);
        csv1 = s1.str();
        csv2 = s2.str();
    }
    check(c, !csv1.empty() && csv1.find("instance,") == 0, "csv missing header");
    check(c, strip_time_columns(csv1) == strip_time_columns(csv2),
          "csv differs beyond wall-time columns");
    check(c, csv1.find("failed") == std::string::npos && csv1.find("timeout") == std::string::npos,
          "bench instances did not all solve");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    if (argc > 2) g_test_dir = argv[2];
    if (g_test_dir.empty()) {
        const char* env = std::getenv("SKOLEM_TEST_DIR");
        g_test_dir = env ? env : ".";
    }

    struct Entry {
        int id;
        const char* name;
        void (*fn)(Criterion&);
        double budget_s;  // 0 = no bound asserted
    };
    std::vector<Entry> entries = {
        {1, "golden-example", criterion_golden, 1.0},
        {2, "theorem1-oracle-suite", run_shared_suite, 60.0},
        {3, "unate-oracle-suite", criterion_unate, 30.0},
        {4, "maxsat-optimality", criterion_maxsat, 30.0},
        {5, "learner-fidelity", criterion_learner, 0.0},
        {6, "sampler-bias-direction", criterion_sampler, 10.0},
        {7, "self-substitution-trend", criterion_selfsub, 0.0},
        {8, "maxsat-localization-ablation", criterion_ablation, 0.0},
        {9, "convergence-invariant", criterion_convergence, 0.0},
        {10, "bench-determinism", criterion_determinism, 0.0},
    };

    bool all_pass = true;
    for (Entry& e : entries) {
        Criterion c;
        c.id = e.id;
        c.name = e.name;
        auto t0 = Clock::now();
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            check(c, false, std::string("exception: ") + ex.what());
        }
        c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (e.budget_s > 0 && c.seconds >= e.budget_s)
            check(c, false, "runtime " + std::to_string(c.seconds) + "s exceeds budget");
        std::printf("%s  criterion-%d %s (%.2fs)%s%s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.seconds, c.detail.str().empty() ? "" : " -- ",
                    c.detail.str().c_str());
        all_pass = all_pass && c.pass;
    }
    return all_pass ? 0 : 1;
}
