#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "skolem/expr.hpp"
#include "skolem/refiner.hpp"
#include "skolem/sampler.hpp"
#include "skolem/types.hpp"

namespace skolem {

struct RunConfig {
    int samples = -1;  // -1 = auto tiers by |Y|
    double min_impurity_decrease = 0.005;
    int probe_n = 500;
    int self_sub_threshold = 10;
    uint64_t seed = 1;
    int64_t conflict_budget = 10'000'000;
    int iteration_cap = 5000;
    double timeout_seconds = 0.0;  // 0 = none
    NjMode nj_mode = NjMode::Sigma2;
    LocalizationMode localization = LocalizationMode::MaxSat;
    bool reverse_maxsat_tie_break = false;
    bool gk_primed_yhat = false;
    bool unprimed_error_formula = false;
    bool force_cdcl_sampling = false;
    std::ostream* diag = nullptr;       // human-readable diagnostic lines
    std::ostream* diag_json = nullptr;  // JSON-lines refinement records
};

enum class RunStatus { SolvedPreprocess, SolvedLearn, SolvedRefine, Failed, Timeout };

const char* to_string(RunStatus s);

struct RunRecord {
    std::string instance;
    int num_x = 0;
    int num_y = 0;
    RunStatus status = RunStatus::Failed;
    int refinement_iterations = 0;
    std::map<Var, int> refine_counts;
    std::vector<Var> self_substituted;
    int convergence_violations = 0;
    double preprocess_s = 0, sampling_s = 0, learning_s = 0, refinement_s = 0, total_s = 0;
    std::string failure_reason;

    bool solved() const {
        return status == RunStatus::SolvedPreprocess || status == RunStatus::SolvedLearn ||
               status == RunStatus::SolvedRefine;
    }
};

struct SynthesisResult {
    RunRecord record;
    std::map<Var, ExprRef> psi;  // X-only functions when solved
};

// The full pipeline: unate preprocessing, adaptive sampling, decision-tree
// candidates, verify/refine loop, back-substitution, and a final
// re-verification of the X-only vector against the original matrix. Every
// solved status is gated by that last check.
SynthesisResult synthesize(const QbfSpec& spec, ExprArena& arena, const RunConfig& cfg,
                           const std::string& instance_name = "");

struct VerifyFunctionsResult {
    bool valid = false;
    bool unknown = false;
    Assignment counterexample;           // over the error formula's variables
    std::map<Var, Var> prime_map;
};

// Standalone certification of a function vector against a specification.
VerifyFunctionsResult verify_functions(const QbfSpec& spec, ExprArena& arena,
                                       const std::map<Var, ExprRef>& psi,
                                       const RunConfig& cfg = {});

// Benchmark sweep over every .qdimacs file in a directory. Per-instance
// seeds derive from the master seed and the file name, so results do not
// depend on scheduling; failures are recorded, never fatal.
std::vector<RunRecord> bench_dir(const std::string& dir, const RunConfig& cfg, int jobs = 1);

// CSV with one row per record plus a running cumulative-time column.
void write_bench_csv(const std::vector<RunRecord>& records, std::ostream& out);
// Solve counts per phase plus failures, table-shaped.
void write_bench_summary(const std::vector<RunRecord>& records, std::ostream& out);

uint64_t derive_instance_seed(uint64_t master_seed, const std::string& name);

}  // namespace skolem
