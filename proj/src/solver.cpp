#include "skolem/solver.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>

namespace skolem {

namespace {

// Luby sequence for restart scheduling.
int64_t luby(int64_t i) {
    int64_t k = 1;
    while ((1ll << k) - 1 < i + 1) ++k;
    while ((1ll << k) - 1 != i + 1) {
        --k;
        i -= (1ll << k) - 1;
    }
    return 1ll << (k - 1);
}

constexpr int64_t kRestartBase = 100;

}  // namespace

Solver::Solver(uint64_t seed) : rng_(seed) {
    values_.resize(1, -1);
    levels_.resize(1, 0);
    reasons_.resize(1, -1);
    activity_.resize(1, 0.0);
    phase_.resize(1, 0);
    seen_.resize(1, 0);
    watches_.resize(2);
}

Var Solver::new_var() {
    ++nvars_;
    values_.push_back(-1);
    levels_.push_back(0);
    reasons_.push_back(-1);
    activity_.push_back(0.0);
    phase_.push_back(0);
    seen_.push_back(0);
    watches_.resize(2 * nvars_ + 2);
    return static_cast<Var>(nvars_);
}

void Solver::ensure_vars(Var n) {
    while (static_cast<Var>(nvars_) < n) new_var();
}

void Solver::add_clause(std::vector<Lit> lits) {
    assert(decision_level() == 0);
    if (!ok_) return;
    for (Lit l : lits) ensure_vars(l.var());
    auto made = Clause::make(std::move(lits));
    if (!made) return;  // tautology
    // Simplify against the top-level trail.
    std::vector<Lit> out;
    for (Lit l : made->lits()) {
        if (lit_true(l)) return;
        if (!lit_false(l)) out.push_back(l);
    }
    if (out.empty()) {
        ok_ = false;
        return;
    }
    if (out.size() == 1) {
        enqueue(out[0], -1);
        if (propagate() != -1) ok_ = false;
        return;
    }
    Cls cls;
    cls.lits = std::move(out);
    clauses_.push_back(std::move(cls));
    attach(static_cast<int>(clauses_.size()) - 1);
}

void Solver::add_cnf(const CnfFormula& f) {
    ensure_vars(f.num_vars);
    for (const Clause& c : f.clauses) add_clause(c.lits());
}

void Solver::attach(int ci) {
    const Cls& c = clauses_[ci];
    assert(c.lits.size() >= 2);
    watches_[c.lits[0].code()].push_back(ci);
    watches_[c.lits[1].code()].push_back(ci);
}

void Solver::enqueue(Lit l, int reason) {
    assert(!value_defined(l.var()));
    values_[l.var()] = l.negated() ? 0 : 1;
    levels_[l.var()] = decision_level();
    reasons_[l.var()] = reason;
    trail_.push_back(l);
}

void Solver::cancel_until(int level) {
    if (decision_level() <= level) return;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[level]; --i) {
        Var v = trail_[i].var();
        if (bias_.empty()) phase_[v] = values_[v];
        values_[v] = -1;
        reasons_[v] = -1;
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
}

int Solver::propagate() {
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        std::vector<int>& ws = watches_[(~p).code()];
        size_t keep = 0;
        for (size_t wi = 0; wi < ws.size(); ++wi) {
            int ci = ws[wi];
            Cls& c = clauses_[ci];
            if (c.deleted) continue;  // reclaimed lazily
            if (c.lits[0] == ~p) std::swap(c.lits[0], c.lits[1]);
            assert(c.lits[1] == ~p);
            if (lit_true(c.lits[0])) {
                ws[keep++] = ci;
                continue;
            }
            bool moved = false;
            for (size_t k = 2; k < c.lits.size(); ++k) {
                if (!lit_false(c.lits[k])) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[c.lits[1].code()].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            if (lit_false(c.lits[0])) {
                // Conflict; keep remaining watches intact.
                for (size_t k = wi; k < ws.size(); ++k) ws[keep++] = ws[k];
                ws.resize(keep);
                qhead_ = trail_.size();
                return ci;
            }
            enqueue(c.lits[0], ci);
            ws[keep++] = ci;
        }
        ws.resize(keep);
    }
    return -1;
}

void Solver::bump(Var v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (size_t i = 1; i <= nvars_; ++i) activity_[i] *= 1e-100;
        var_inc_ *= 1e-100;
    }
}

void Solver::bump_clause(int ci) {
    Cls& c = clauses_[ci];
    if (!c.learnt) return;
    c.act += cla_inc_;
    if (c.act > 1e20) {
        for (Cls& other : clauses_)
            if (other.learnt) other.act *= 1e-20;
        cla_inc_ *= 1e-20;
    }
}

void Solver::decay() {
    var_inc_ /= 0.95;
    cla_inc_ /= 0.999;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level) {
    learnt.clear();
    learnt.push_back(Lit());  // slot for the asserting literal
    std::vector<Var> to_clear;
    int counter = 0;
    Lit p;
    bool have_p = false;
    int index = static_cast<int>(trail_.size());

    for (;;) {
        assert(confl != -1);
        bump_clause(confl);
        const Cls& c = clauses_[confl];
        for (size_t i = have_p ? 1 : 0; i < c.lits.size(); ++i) {
            Lit q = c.lits[i];
            if (!seen_[q.var()] && levels_[q.var()] > 0) {
                seen_[q.var()] = 1;
                to_clear.push_back(q.var());
                bump(q.var());
                if (levels_[q.var()] >= decision_level())
                    ++counter;
                else
                    learnt.push_back(q);
            }
        }
        while (!seen_[trail_[--index].var()]) {}
        p = trail_[index];
        have_p = true;
        confl = reasons_[p.var()];
        seen_[p.var()] = 0;
        --counter;
        if (counter == 0) break;
    }
    learnt[0] = ~p;

    // Local minimization: a literal is redundant when its reason is covered
    // by the clause itself (plus top-level facts).
    size_t w = 1;
    for (size_t i = 1; i < learnt.size(); ++i) {
        Var v = learnt[i].var();
        int r = reasons_[v];
        bool redundant = r != -1;
        if (redundant) {
            const Cls& rc = clauses_[r];
            for (size_t k = 1; k < rc.lits.size(); ++k) {
                Var u = rc.lits[k].var();
                if (!seen_[u] && levels_[u] > 0) {
                    redundant = false;
                    break;
                }
            }
        }
        if (!redundant) learnt[w++] = learnt[i];
    }
    learnt.resize(w);

    bt_level = 0;
    if (learnt.size() > 1) {
        size_t max_i = 1;
        for (size_t i = 2; i < learnt.size(); ++i)
            if (levels_[learnt[i].var()] > levels_[learnt[max_i].var()]) max_i = i;
        std::swap(learnt[1], learnt[max_i]);
        bt_level = levels_[learnt[1].var()];
    }
    for (Var v : to_clear) seen_[v] = 0;
}

bool Solver::locked(int ci) const {
    const Cls& c = clauses_[ci];
    Var v = c.lits[0].var();
    return values_[v] >= 0 && reasons_[v] == ci;
}

void Solver::reduce_db() {
    // Tombstone the less active half of the learned clauses; watch lists
    // shed the dead entries lazily during propagation. Index order breaks
    // activity ties to keep runs reproducible.
    std::vector<int> cand;
    for (int ci = 0; ci < static_cast<int>(clauses_.size()); ++ci) {
        const Cls& c = clauses_[ci];
        if (c.learnt && !c.deleted && c.lits.size() > 2 && !locked(ci)) cand.push_back(ci);
    }
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (clauses_[a].act != clauses_[b].act) return clauses_[a].act < clauses_[b].act;
        return a < b;
    });
    for (size_t i = 0; i < cand.size() / 2; ++i) {
        Cls& c = clauses_[cand[i]];
        c.deleted = true;
        c.lits.clear();
        c.lits.shrink_to_fit();
        --num_learnts_;
    }
    max_learnts_ = max_learnts_ + max_learnts_ / 2;
}

void Solver::analyze_final(Lit p, std::vector<Lit>& core) {
    core.clear();
    core.push_back(p);
    if (decision_level() == 0) return;
    seen_[p.var()] = 1;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
        Var v = trail_[i].var();
        if (!seen_[v]) continue;
        if (reasons_[v] == -1) {
            // A decision inside the assumption prefix, i.e. an assumption.
            core.push_back(trail_[i]);
        } else {
            const Cls& c = clauses_[reasons_[v]];
            for (size_t k = 1; k < c.lits.size(); ++k)
                if (levels_[c.lits[k].var()] > 0) seen_[c.lits[k].var()] = 1;
        }
        seen_[v] = 0;
    }
    seen_[p.var()] = 0;
}

double Solver::rand_double() {
    return (rng_() >> 11) * (1.0 / 9007199254740992.0);
}

uint64_t Solver::rand_u64() { return rng_(); }

Var Solver::pick_branch_var() {
    if (sampling_mode_) {
        size_t unassigned = 0;
        for (size_t v = 1; v <= nvars_; ++v)
            if (values_[v] < 0) ++unassigned;
        if (unassigned == 0) return 0;
        size_t idx = rand_u64() % unassigned;
        for (size_t v = 1; v <= nvars_; ++v) {
            if (values_[v] < 0) {
                if (idx == 0) return static_cast<Var>(v);
                --idx;
            }
        }
        return 0;
    }
    Var best = 0;
    double best_act = -1.0;
    for (size_t v = 1; v <= nvars_; ++v) {
        if (values_[v] < 0 && activity_[v] > best_act) {
            best = static_cast<Var>(v);
            best_act = activity_[v];
        }
    }
    return best;
}

bool Solver::pick_polarity(Var v) {
    if (!bias_.empty() && v < static_cast<Var>(bias_.size()) && bias_[v] >= 0.0)
        return rand_double() < bias_[v];
    return phase_[v] == 1;
}

SatOutcome Solver::search(const std::vector<Lit>& assumptions) {
    SatOutcome out;
    int64_t conflicts_this_call = 0;
    int64_t restart_count = 0;
    int64_t restart_limit = kRestartBase * luby(restart_count);
    int64_t conflicts_since_restart = 0;
    std::vector<Lit> learnt;

    for (;;) {
        int confl = propagate();
        if (confl != -1) {
            ++conflicts_this_call;
            ++total_conflicts_;
            ++conflicts_since_restart;
            if (decision_level() == 0) {
                ok_ = false;
                out.status = SolveStatus::Unsat;
                return out;
            }
            if (conflicts_this_call > conflict_budget_) {
                cancel_until(0);
                out.status = SolveStatus::Unknown;
                return out;
            }
            if (deadline_ && (conflicts_this_call & 255) == 0 &&
                std::chrono::steady_clock::now() > *deadline_) {
                cancel_until(0);
                out.status = SolveStatus::Unknown;
                return out;
            }
            int bt_level;
            analyze(confl, learnt, bt_level);
            // Never backjump into the assumption prefix's pending part: a
            // falsified assumption is detected when re-consumed below.
            cancel_until(bt_level);
            if (learnt.size() == 1) {
                // bt_level is 0 for a unit; it lands on the top level.
                if (value_defined(learnt[0].var())) {
                    if (lit_false(learnt[0])) {
                        ok_ = false;
                        out.status = SolveStatus::Unsat;
                        return out;
                    }
                } else {
                    enqueue(learnt[0], -1);
                }
            } else {
                Cls cls;
                cls.lits = learnt;
                cls.learnt = true;
                clauses_.push_back(std::move(cls));
                int ci = static_cast<int>(clauses_.size()) - 1;
                attach(ci);
                bump_clause(ci);
                enqueue(learnt[0], ci);
                ++num_learnts_;
            }
            decay();
            if (num_learnts_ > max_learnts_) reduce_db();
            continue;
        }

        if (conflicts_since_restart >= restart_limit) {
            conflicts_since_restart = 0;
            restart_limit = kRestartBase * luby(++restart_count);
            cancel_until(0);
            continue;
        }

        // Consume assumptions, one decision level each.
        Lit next;
        bool have_next = false;
        while (decision_level() < static_cast<int>(assumptions.size())) {
            Lit a = assumptions[decision_level()];
            ensure_vars(a.var());
            if (lit_true(a)) {
                new_decision_level();
            } else if (lit_false(a)) {
                analyze_final(a, out.core);
                cancel_until(0);
                out.status = SolveStatus::Unsat;
                return out;
            } else {
                next = a;
                have_next = true;
                break;
            }
        }
        if (!have_next) {
            Var v = pick_branch_var();
            if (v == 0) {
                out.status = SolveStatus::Sat;
                for (size_t u = 1; u <= nvars_; ++u)
                    out.model.set(static_cast<Var>(u), values_[u] == 1);
                cancel_until(0);
                return out;
            }
            next = Lit(v, !pick_polarity(v));
        }
        new_decision_level();
        enqueue(next, -1);
    }
}

SatOutcome Solver::solve(const std::vector<Lit>& assumptions) {
    for (Lit a : assumptions) ensure_vars(a.var());
    SatOutcome out;
    if (!ok_) {
        out.status = SolveStatus::Unsat;
        return out;
    }
    if (propagate() != -1) {
        ok_ = false;
        out.status = SolveStatus::Unsat;
        return out;
    }
    return search(assumptions);
}

SatOutcome Solver::sample(const std::vector<double>& bias_by_var) {
    bias_ = bias_by_var;
    sampling_mode_ = true;
    SatOutcome out = solve({});
    sampling_mode_ = false;
    bias_.clear();
    return out;
}

void Solver::dump_dimacs(std::ostream& out) const {
    size_t units = decision_level() == 0 ? trail_.size() : static_cast<size_t>(trail_lim_[0]);
    size_t live = 0;
    for (const Cls& c : clauses_)
        if (!c.deleted) ++live;
    out << "p cnf " << nvars_ << ' ' << live + units + (ok_ ? 0 : 1) << '\n';
    for (size_t i = 0; i < units; ++i) out << trail_[i].to_dimacs() << " 0\n";
    for (const Cls& c : clauses_) {
        if (c.deleted) continue;
        for (Lit l : c.lits) out << l.to_dimacs() << ' ';
        out << "0\n";
    }
    if (!ok_) out << "0\n";
}

EnumerateResult enumerate_models(const CnfFormula& f, int64_t cap, uint64_t seed) {
    EnumerateResult res;
    Solver s(seed);
    s.add_cnf(f);
    s.ensure_vars(f.num_vars);
    for (;;) {
        SatOutcome o = s.solve();
        if (o.status != SolveStatus::Sat) break;
        if (static_cast<int64_t>(res.models.size()) >= cap) {
            res.capped = true;
            break;
        }
        Assignment m;
        std::vector<Lit> block;
        block.reserve(f.num_vars);
        for (Var v = 1; v <= f.num_vars; ++v) {
            bool b = o.model.value(v);
            m.set(v, b);
            block.push_back(Lit(v, b));  // negation of the model cube
        }
        res.models.push_back(std::move(m));
        s.add_clause(std::move(block));
    }
    return res;
}

}  // namespace skolem
