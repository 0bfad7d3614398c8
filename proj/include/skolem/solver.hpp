#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "skolem/types.hpp"

namespace skolem {

enum class SolveStatus { Sat, Unsat, Unknown };

// Outcome of one decision call. On Sat the model is total over the solver's
// variables. On Unsat under assumptions, core is a (not necessarily minimal)
// subset of the assumption literals whose conjunction with the clauses is
// unsatisfiable; empty when the clauses alone are unsatisfiable.
struct SatOutcome {
    SolveStatus status = SolveStatus::Unknown;
    Assignment model;
    std::vector<Lit> core;
};

// CDCL solver with incremental clause addition, assumption-based solving,
// failed-assumption cores, Luby restarts and VSIDS decisions. The clause
// database only grows within a session. Deterministic for a fixed seed and
// clause insertion order. Single-owner; not shareable across threads.
class Solver {
public:
    explicit Solver(uint64_t seed = 1);

    Var new_var();
    void ensure_vars(Var n);
    Var num_vars() const { return static_cast<Var>(nvars_); }

    // Duplicate literals are dropped; tautologies are ignored.
    void add_clause(std::vector<Lit> lits);
    void add_cnf(const CnfFormula& f);

    SatOutcome solve(const std::vector<Lit>& assumptions = {});

    // Draws one model with per-variable decision polarity: variable v is
    // decided true with probability bias[v] and the decision variable itself
    // is chosen uniformly at random among the unassigned. Successive calls
    // consume fresh RNG draws. Phase saving is inactive while a bias table
    // is set.
    SatOutcome sample(const std::vector<double>& bias_by_var);

    // Conflicts allowed per solve call before giving up with Unknown.
    void set_conflict_budget(int64_t budget) { conflict_budget_ = budget; }
    // Cooperative wall-clock cutoff, checked between conflicts.
    void set_deadline(std::optional<std::chrono::steady_clock::time_point> d) { deadline_ = d; }

    void dump_dimacs(std::ostream& out) const;

    int64_t conflicts() const { return total_conflicts_; }

private:
    struct Cls {
        std::vector<Lit> lits;
        double act = 0.0;
        bool learnt = false;
        bool deleted = false;
    };

    bool value_defined(Var v) const { return values_[v] >= 0; }
    bool lit_true(Lit l) const { return values_[l.var()] == (l.negated() ? 0 : 1); }
    bool lit_false(Lit l) const { return values_[l.var()] == (l.negated() ? 1 : 0); }

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }
    void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }
    void enqueue(Lit l, int reason);
    void cancel_until(int level);
    int propagate();  // -1 when no conflict, else conflicting clause index
    void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
    void analyze_final(Lit p, std::vector<Lit>& core);
    void bump(Var v);
    void bump_clause(int ci);
    void decay();
    bool locked(int ci) const;
    void reduce_db();
    Var pick_branch_var();
    bool pick_polarity(Var v);
    void attach(int ci);
    double rand_double();
    uint64_t rand_u64();

    SatOutcome search(const std::vector<Lit>& assumptions);

    size_t nvars_ = 0;
    std::vector<Cls> clauses_;
    std::vector<std::vector<int>> watches_;  // by literal code
    std::vector<int8_t> values_;             // by var: -1/0/1
    std::vector<int> levels_;
    std::vector<int> reasons_;               // clause index or -1
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    size_t qhead_ = 0;
    std::vector<double> activity_;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    std::vector<int8_t> phase_;
    std::vector<int8_t> seen_;
    size_t num_learnts_ = 0;
    size_t max_learnts_ = 4000;
    bool ok_ = true;

    std::vector<double> bias_;  // empty = inactive
    bool sampling_mode_ = false;

    int64_t conflict_budget_ = 10'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline_;
    int64_t total_conflicts_ = 0;

    std::mt19937_64 rng_;
};

// All models of f (over variables 1..f.num_vars) up to cap, found by
// repeatedly blocking full assignments.
struct EnumerateResult {
    std::vector<Assignment> models;
    bool capped = false;
};
EnumerateResult enumerate_models(const CnfFormula& f, int64_t cap, uint64_t seed = 1);

}  // namespace skolem
