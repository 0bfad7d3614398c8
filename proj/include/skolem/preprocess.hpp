#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "skolem/expr.hpp"
#include "skolem/types.hpp"

namespace skolem {

enum class UnateStatus { Yes, No, Unknown };

struct UnateReport {
    std::vector<Var> positive;
    std::vector<Var> negative;
    CnfFormula reduced_matrix;
};

struct PreprocessLimits {
    int64_t conflict_budget = 10'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Positive: f|y=0 and the negation of f|y=1 are jointly unsatisfiable.
// The two parts share X and Y\{y}; only the negation's selector layer is
// fresh. Solver exhaustion reports Unknown, which the pass treats as
// not-unate.
UnateStatus check_positive_unate(const CnfFormula& f, Var y, const PreprocessLimits& lim = {});
UnateStatus check_negative_unate(const CnfFormula& f, Var y, const PreprocessLimits& lim = {});

struct PreprocessResult {
    UnateReport report;
    std::map<Var, ExprRef> psi;  // constants for the detected unates
};

// Single sequential pass in y_vars order: positive check first, then
// negative; each hit substitutes the constant into the matrix, and later
// checks run against the reduced matrix. Reports `unate +y<i>` /
// `unate -y<i>` lines on diag when given.
PreprocessResult preprocess(const QbfSpec& spec, ExprArena& arena, std::ostream* diag = nullptr,
                            const PreprocessLimits& lim = {});

}  // namespace skolem
