#include "skolem/types.hpp"

namespace skolem {

int eval_cnf(const CnfFormula& f, const Assignment& a) {
    bool all_sat = true;
    for (const Clause& c : f.clauses) {
        bool sat = false;
        for (Lit l : c.lits())
            if (a.value(l)) sat = true;
        if (!sat) all_sat = false;
    }
    return all_sat ? 1 : 0;
}

CnfFormula substitute_const(const CnfFormula& f, Var v, int b) {
    CnfFormula out;
    out.num_vars = f.num_vars;
    for (const Clause& c : f.clauses) {
        bool satisfied = false;
        std::vector<Lit> kept;
        kept.reserve(c.size());
        for (Lit l : c.lits()) {
            if (l.var() == v) {
                if (l.negated() == (b == 0)) satisfied = true;
            } else {
                kept.push_back(l);
            }
        }
        if (satisfied) continue;
        if (kept.empty()) return unsat_cnf(f.num_vars);
        out.clauses.push_back(*Clause::make(std::move(kept)));
    }
    return out;
}

Lit negate_cnf(const CnfFormula& f, const std::function<Var(Var)>& rename, CnfFormula& sink) {
    std::vector<Lit> selectors;
    selectors.reserve(f.clauses.size());
    for (const Clause& c : f.clauses) {
        Lit z = mk_lit(sink.new_var());
        // z <-> renamed clause
        std::vector<Lit> impl{~z};
        for (Lit l : c.lits()) {
            Lit r(rename(l.var()), l.negated());
            impl.push_back(r);
            sink.add_clause({~r, z});
        }
        sink.add_clause(std::move(impl));
        selectors.push_back(z);
    }
    Lit out = mk_lit(sink.new_var());
    std::vector<Lit> some_false{~out};
    for (Lit z : selectors) some_false.push_back(~z);
    sink.add_clause(std::move(some_false));
    return out;
}

}  // namespace skolem
