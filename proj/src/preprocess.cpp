#include "skolem/preprocess.hpp"

#include <ostream>

#include "skolem/solver.hpp"

namespace skolem {

namespace {

UnateStatus check_unate(const CnfFormula& f, Var y, int kept_value, const PreprocessLimits& lim) {
    // kept_value=1 checks positive: f|y=0 AND NOT f|y=1.
    CnfFormula sink = substitute_const(f, y, 1 - kept_value);
    CnfFormula other = substitute_const(f, y, kept_value);
    Lit neg = negate_cnf(other, [](Var v) { return v; }, sink);
    sink.add_clause({neg});

    Solver s;
    s.set_conflict_budget(lim.conflict_budget);
    s.set_deadline(lim.deadline);
    s.add_cnf(sink);
    SatOutcome o = s.solve();
    switch (o.status) {
        case SolveStatus::Unsat: return UnateStatus::Yes;
        case SolveStatus::Sat: return UnateStatus::No;
        default: return UnateStatus::Unknown;
    }
}

}  // namespace

UnateStatus check_positive_unate(const CnfFormula& f, Var y, const PreprocessLimits& lim) {
    return check_unate(f, y, 1, lim);
}

UnateStatus check_negative_unate(const CnfFormula& f, Var y, const PreprocessLimits& lim) {
    return check_unate(f, y, 0, lim);
}

PreprocessResult preprocess(const QbfSpec& spec, ExprArena& arena, std::ostream* diag,
                            const PreprocessLimits& lim) {
    PreprocessResult res;
    res.report.reduced_matrix = spec.matrix;
    for (Var y : spec.y_vars) {
        if (check_positive_unate(res.report.reduced_matrix, y, lim) == UnateStatus::Yes) {
            res.report.positive.push_back(y);
            res.report.reduced_matrix = substitute_const(res.report.reduced_matrix, y, 1);
            res.psi[y] = arena.const1();
            if (diag) *diag << "unate +y" << y << '\n';
            continue;
        }
        if (check_negative_unate(res.report.reduced_matrix, y, lim) == UnateStatus::Yes) {
            res.report.negative.push_back(y);
            res.report.reduced_matrix = substitute_const(res.report.reduced_matrix, y, 0);
            res.psi[y] = arena.const0();
            if (diag) *diag << "unate -y" << y << '\n';
        }
    }
    return res;
}

}  // namespace skolem
