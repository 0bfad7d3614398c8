#include "skolem/maxsat.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>

namespace skolem {

namespace {

// Totalizer counting layer: given input literals, produces output literals
// o[0..n-1] where "at least k inputs are true" implies o[k-1]. Only that
// direction is encoded, which suffices to enforce at-most-k by assuming
// ~o[k]. Fresh variables come from the solver.
std::vector<Lit> build_totalizer(Solver& s, const std::vector<Lit>& inputs) {
    if (inputs.size() == 1) return inputs;
    size_t mid = inputs.size() / 2;
    std::vector<Lit> left = build_totalizer(s, {inputs.begin(), inputs.begin() + mid});
    std::vector<Lit> right = build_totalizer(s, {inputs.begin() + mid, inputs.end()});
    std::vector<Lit> out;
    out.reserve(left.size() + right.size());
    for (size_t i = 0; i < left.size() + right.size(); ++i) out.push_back(mk_lit(s.new_var()));
    for (size_t i = 0; i <= left.size(); ++i) {
        for (size_t j = 0; j <= right.size(); ++j) {
            if (i + j == 0) continue;
            std::vector<Lit> cl;
            if (i > 0) cl.push_back(~left[i - 1]);
            if (j > 0) cl.push_back(~right[j - 1]);
            cl.push_back(out[i + j - 1]);
            s.add_clause(std::move(cl));
        }
    }
    return out;
}

size_t count_falsified(const Assignment& m, const std::vector<SoftLit>& soft) {
    size_t n = 0;
    for (const SoftLit& s : soft)
        if (!m.value(s.lit)) ++n;
    return n;
}

}  // namespace

MaxSatResult maxsat(const MaxSatQuery& q) {
    Solver s(q.seed);
    s.add_cnf(q.hard);
    s.ensure_vars(q.hard.num_vars);

    // Relaxation indicators: r_i true is allowed whenever the soft is
    // violated, so "at most k of r" means "cost at most k".
    std::vector<Lit> relax;
    relax.reserve(q.soft.size());
    for (const SoftLit& sl : q.soft) {
        Lit r = mk_lit(s.new_var());
        s.add_clause({sl.lit, r});
        relax.push_back(r);
    }

    if (q.soft.empty()) {
        SatOutcome o = s.solve();
        if (o.status != SolveStatus::Sat) throw HardUnsatError();
        return {std::move(o.model), {}};
    }

    // Phase 1: linear search. Assume every remaining soft; on UNSAT drop the
    // core member with the lowest tag. Terminates in at most |soft| rounds.
    std::vector<bool> dropped(q.soft.size(), false);
    Assignment best;
    for (;;) {
        std::vector<Lit> assumptions;
        std::vector<size_t> assumed_idx;
        for (size_t i = 0; i < q.soft.size(); ++i) {
            if (!dropped[i]) {
                assumptions.push_back(q.soft[i].lit);
                assumed_idx.push_back(i);
            }
        }
        SatOutcome o = s.solve(assumptions);
        if (o.status == SolveStatus::Sat) {
            best = std::move(o.model);
            break;
        }
        assert(o.status == SolveStatus::Unsat);
        if (o.core.empty()) throw HardUnsatError();
        size_t victim = q.soft.size();
        for (Lit cl : o.core) {
            for (size_t i : assumed_idx) {
                if (q.soft[i].lit == cl && (victim == q.soft.size() || q.soft[i].tag < q.soft[victim].tag))
                    victim = i;
            }
        }
        if (victim == q.soft.size()) throw HardUnsatError();  // core held no soft: hard side alone failed
        dropped[victim] = true;
    }

    size_t cost = count_falsified(best, q.soft);

    // Phase 2: descending cardinality check proves the bound optimal.
    if (cost > 0) {
        std::vector<Lit> outs = build_totalizer(s, relax);
        while (cost > 0) {
            // at most cost-1 violated
            SatOutcome o = s.solve({~outs[cost - 1]});
            if (o.status != SolveStatus::Sat) break;
            best = std::move(o.model);
            size_t next = count_falsified(best, q.soft);
            assert(next < cost);
            cost = next;
        }

        // Phase 3: deterministic tie-break at the optimal cost.
        std::vector<Lit> committed;
        if (cost < q.soft.size()) committed.push_back(~outs[cost]);
        std::vector<size_t> order(q.soft.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (q.reverse_tie_break) std::reverse(order.begin(), order.end());
        for (size_t i : order) {
            committed.push_back(q.soft[i].lit);
            SatOutcome o = s.solve(committed);
            if (o.status == SolveStatus::Sat) {
                best = std::move(o.model);
            } else {
                committed.back() = ~q.soft[i].lit;
            }
        }
        SatOutcome o = s.solve(committed);
        assert(o.status == SolveStatus::Sat);
        best = std::move(o.model);
        assert(count_falsified(best, q.soft) == cost);
    }

    MaxSatResult res;
    for (const SoftLit& sl : q.soft)
        if (!best.value(sl.lit)) res.falsified.push_back(sl.tag);
    // Model restricted to the query's variables; relaxation and totalizer
    // internals are not the caller's business.
    Var mv = q.hard.num_vars;
    for (const SoftLit& sl : q.soft) mv = std::max(mv, sl.lit.var());
    for (Var v = 1; v <= mv; ++v) res.model.set(v, best.value(v));
    return res;
}

void dump_wdimacs(const MaxSatQuery& q, std::ostream& out) {
    int64_t top = static_cast<int64_t>(q.soft.size()) + 1;
    out << "p wcnf " << q.hard.num_vars << ' ' << q.hard.clauses.size() + q.soft.size() << ' ' << top
        << '\n';
    for (const Clause& c : q.hard.clauses) {
        out << top;
        for (Lit l : c.lits()) out << ' ' << l.to_dimacs();
        out << " 0\n";
    }
    for (const SoftLit& sl : q.soft) out << "1 " << sl.lit.to_dimacs() << " 0\n";
}

}  // namespace skolem
