#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "skolem/expr.hpp"
#include "skolem/solver.hpp"
#include "skolem/types.hpp"

namespace skolem {

// CNF over X, Y, Y' and auxiliaries whose models, projected to (X, Y, Y'),
// are exactly those of F(X,Y) and not-F(X,Y') and (Y' <-> Psi).
struct ErrorFormulaBundle {
    CnfFormula cnf;
    std::map<Var, Var> prime_map;  // y -> y'
};

// Candidate functions may reference other outputs; those references are
// mapped to the primed copies so each constraint reads y' <-> psi(X, Y').
// `unprimed` keeps the references on the plain Y side instead.
ErrorFormulaBundle build_error_formula(const QbfSpec& spec, ExprArena& arena,
                                       const std::map<Var, ExprRef>& psi, bool unprimed = false);

enum class VerifyStatus { Valid, Counterexample, Unknown };

struct VerifyResult {
    VerifyStatus status = VerifyStatus::Unknown;
    Assignment sigma;  // model of the error formula when Counterexample
    ErrorFormulaBundle bundle;
};

struct RefinerLimits {
    int64_t conflict_budget = 10'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Valid iff the error formula is unsatisfiable.
VerifyResult verify(const QbfSpec& spec, ExprArena& arena, const std::map<Var, ExprRef>& psi,
                    bool unprimed = false, const RefinerLimits& lim = {});

// For each output in order, substitutes the functions of everything after it
// in the total order; afterwards no function references any Y variable
// (violations throw). Processing runs back-to-front so substituted bodies
// are already X-only.
void substitute_all(ExprArena& arena, std::map<Var, ExprRef>& psi,
                    const std::vector<Var>& total_order);

// The matrix with y_k set to 1, as an expression over X and the outputs in
// `keep`; any other output is eliminated by existential expansion
// (g|v=0 or g|v=1). Unsatisfiable reduced matrices yield false.
ExprRef self_substitute_expr(const CnfFormula& matrix, ExprArena& arena, Var y_k,
                             const QbfSpec& spec, const std::set<Var>& keep);

enum class LocalizationMode { MaxSat, NaiveDisagree };

struct RefinerConfig {
    int self_sub_threshold = 10;
    LocalizationMode localization = LocalizationMode::MaxSat;
    bool reverse_maxsat_tie_break = false;
    bool gk_primed_yhat = false;  // freeze Y-hat to sigma[Y'-hat] instead of sigma[Y-hat]
    RefinerLimits limits;
    uint64_t seed = 1;
};

enum class RefineStatus { Progress, Stuck, Unknown };

struct RefineStats {
    std::map<Var, int> refine_count;
    std::vector<Var> self_substituted;
    int total_repairs = 0;
    int convergence_violations = 0;  // duplicate (y, cube) unsat-branch repairs
};

// One counterexample-driven repair round (fault localization plus the repair
// worklist). Holds the per-run refinement state; one instance per synthesis
// run, single-threaded.
class Refiner {
public:
    Refiner(const QbfSpec& spec, ExprArena& arena, std::map<Var, ExprRef>& psi,
            std::vector<Var> total_order, std::map<Var, size_t> tree_nodes, RefinerConfig cfg,
            std::ostream* diag = nullptr, std::ostream* diag_json = nullptr);

    // sigma must satisfy the current error formula (mutated in place by the
    // SAT-branch rule). Guarantees at least one function changed on
    // Progress.
    RefineStatus refine_skf(Assignment& sigma, const std::map<Var, Var>& prime_map, int iter_id);

    const RefineStats& stats() const { return stats_; }

    // Exposed for tests.
    std::vector<Var> fault_localize(const Assignment& sigma, const std::map<Var, Var>& prime_map);
    std::vector<Lit> build_gk_assumptions(const Assignment& sigma, Var y_k,
                                          const std::map<Var, Var>& prime_map) const;
    bool check_substitute(Var y_k) const;

private:
    std::vector<Var> y_hat(Var y_k) const;  // outputs after y_k in the total order
    std::vector<Var> naive_localize(const Assignment& sigma, const std::map<Var, Var>& prime_map);
    // Returns number of repairs applied while processing the worklist.
    int process_worklist(std::vector<Var> ind, Assignment& sigma,
                         const std::map<Var, Var>& prime_map, int iter_id);
    void apply_repair(Var y_k, const std::vector<Var>& core_vars, const Assignment& sigma,
                      const std::map<Var, Var>& prime_map);

    const QbfSpec& spec_;
    ExprArena& arena_;
    std::map<Var, ExprRef>& psi_;
    std::vector<Var> total_order_;
    std::map<Var, int> order_pos_;
    std::map<Var, size_t> tree_nodes_;
    RefinerConfig cfg_;
    std::ostream* diag_;
    std::ostream* diag_json_;

    Solver gk_solver_;  // matrix-only database, assumption queries
    RefineStats stats_;
    std::set<Var> self_substituted_;
    std::set<std::string> repair_keys_;  // non-repetition tracking
};

}  // namespace skolem
