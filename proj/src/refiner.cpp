#include "skolem/refiner.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>

#include "skolem/maxsat.hpp"

namespace skolem {

ErrorFormulaBundle build_error_formula(const QbfSpec& spec, ExprArena& arena,
                                       const std::map<Var, ExprRef>& psi, bool unprimed) {
    ErrorFormulaBundle b;
    b.cnf = spec.matrix;
    for (Var y : spec.y_vars) b.prime_map[y] = b.cnf.new_var();

    auto rename = [&](Var v) {
        auto it = b.prime_map.find(v);
        return it == b.prime_map.end() ? v : it->second;
    };
    Lit neg = negate_cnf(spec.matrix, rename, b.cnf);
    b.cnf.add_clause({neg});

    for (Var y : spec.y_vars) {
        ExprRef f = psi.at(y);
        if (!unprimed) f = arena.map_vars(f, rename);
        Lit t = arena.tseitin(f, b.cnf);
        Lit yp = mk_lit(b.prime_map.at(y));
        b.cnf.add_clause({~yp, t});
        b.cnf.add_clause({yp, ~t});
    }
    return b;
}

VerifyResult verify(const QbfSpec& spec, ExprArena& arena, const std::map<Var, ExprRef>& psi,
                    bool unprimed, const RefinerLimits& lim) {
    VerifyResult res;
    res.bundle = build_error_formula(spec, arena, psi, unprimed);
    Solver s;
    s.set_conflict_budget(lim.conflict_budget);
    s.set_deadline(lim.deadline);
    s.add_cnf(res.bundle.cnf);
    SatOutcome o = s.solve();
    switch (o.status) {
        case SolveStatus::Unsat: res.status = VerifyStatus::Valid; break;
        case SolveStatus::Sat:
            res.status = VerifyStatus::Counterexample;
            res.sigma = std::move(o.model);
            break;
        default: res.status = VerifyStatus::Unknown; break;
    }
    return res;
}

void substitute_all(ExprArena& arena, std::map<Var, ExprRef>& psi,
                    const std::vector<Var>& total_order) {
    // Back to front: by the time y_j is processed, every function after it
    // is already X-only.
    for (int j = static_cast<int>(total_order.size()) - 1; j >= 0; --j) {
        Var y_j = total_order[j];
        ExprRef f = psi.at(y_j);
        for (size_t i = j + 1; i < total_order.size(); ++i) {
            Var y_i = total_order[i];
            f = arena.substitute(f, y_i, psi.at(y_i));
        }
        psi[y_j] = f;
    }
    for (const auto& [y, f] : psi) {
        for (Var v : arena.vars_of(f)) {
            if (std::find(total_order.begin(), total_order.end(), v) != total_order.end())
                throw std::logic_error("substitute_all: residual output reference y" +
                                       std::to_string(v) + " in function of y" + std::to_string(y));
        }
    }
}

ExprRef self_substitute_expr(const CnfFormula& matrix, ExprArena& arena, Var y_k,
                             const QbfSpec& spec, const std::set<Var>& keep) {
    CnfFormula reduced = substitute_const(matrix, y_k, 1);
    std::vector<ExprRef> conj;
    conj.reserve(reduced.clauses.size());
    for (const Clause& c : reduced.clauses) {
        std::vector<ExprRef> lits;
        lits.reserve(c.size());
        for (Lit l : c.lits()) {
            ExprRef v = arena.var(l.var());
            lits.push_back(l.negated() ? arena.negate(v) : v);
        }
        conj.push_back(arena.mk_or(std::move(lits)));
    }
    ExprRef g = arena.mk_and(std::move(conj));

    // References to outputs that may themselves depend on y_k cannot be
    // resolved by substitution later; existentially eliminate them.
    for (Var v : arena.vars_of(g)) {
        if (v == y_k || !spec.is_y(v) || keep.count(v)) continue;
        ExprRef g0 = arena.substitute(g, v, arena.const0());
        ExprRef g1 = arena.substitute(g, v, arena.const1());
        g = arena.mk_or(g0, g1);
    }
    return g;
}

Refiner::Refiner(const QbfSpec& spec, ExprArena& arena, std::map<Var, ExprRef>& psi,
                 std::vector<Var> total_order, std::map<Var, size_t> tree_nodes, RefinerConfig cfg,
                 std::ostream* diag, std::ostream* diag_json)
    : spec_(spec),
      arena_(arena),
      psi_(psi),
      total_order_(std::move(total_order)),
      tree_nodes_(std::move(tree_nodes)),
      cfg_(cfg),
      diag_(diag),
      diag_json_(diag_json),
      gk_solver_(cfg.seed) {
    for (size_t i = 0; i < total_order_.size(); ++i) order_pos_[total_order_[i]] = static_cast<int>(i);
    gk_solver_.add_cnf(spec.matrix);
    gk_solver_.ensure_vars(spec.matrix.num_vars);
    gk_solver_.set_conflict_budget(cfg.limits.conflict_budget);
    gk_solver_.set_deadline(cfg.limits.deadline);
}

std::vector<Var> Refiner::y_hat(Var y_k) const {
    std::vector<Var> out;
    auto it = order_pos_.find(y_k);
    assert(it != order_pos_.end());
    for (size_t i = it->second + 1; i < total_order_.size(); ++i) out.push_back(total_order_[i]);
    return out;
}

std::vector<Var> Refiner::fault_localize(const Assignment& sigma,
                                         const std::map<Var, Var>& prime_map) {
    MaxSatQuery q;
    q.hard = spec_.matrix;
    for (Var x : spec_.x_vars) q.hard.add_clause({Lit(x, !sigma.value(x))});
    for (Var y : spec_.y_vars) {
        bool target = sigma.value(prime_map.at(y));
        q.soft.push_back({Lit(y, !target), y});
    }
    q.reverse_tie_break = cfg_.reverse_maxsat_tie_break;
    q.seed = cfg_.seed;
    return maxsat(q).falsified;
}

std::vector<Var> Refiner::naive_localize(const Assignment& sigma,
                                         const std::map<Var, Var>& prime_map) {
    std::vector<Var> ind;
    for (Var y : spec_.y_vars)
        if (sigma.value(y) != sigma.value(prime_map.at(y))) ind.push_back(y);
    return ind;
}

std::vector<Lit> Refiner::build_gk_assumptions(const Assignment& sigma, Var y_k,
                                               const std::map<Var, Var>& prime_map) const {
    std::vector<Lit> a;
    a.push_back(Lit(y_k, !sigma.value(prime_map.at(y_k))));
    for (Var x : spec_.x_vars) a.push_back(Lit(x, !sigma.value(x)));
    for (Var y : y_hat(y_k)) {
        bool v = cfg_.gk_primed_yhat ? sigma.value(prime_map.at(y)) : sigma.value(y);
        a.push_back(Lit(y, !v));
    }
    return a;
}

bool Refiner::check_substitute(Var y_k) const {
    auto cnt = stats_.refine_count.find(y_k);
    if (cnt == stats_.refine_count.end() || cnt->second <= cfg_.self_sub_threshold) return false;
    auto tn = tree_nodes_.find(y_k);
    return tn != tree_nodes_.end() && tn->second == 1;
}

void Refiner::apply_repair(Var y_k, const std::vector<Var>& core_vars, const Assignment& sigma,
                           const std::map<Var, Var>& prime_map) {
    std::vector<Var> yh = y_hat(y_k);
    std::set<Var> allowed(yh.begin(), yh.end());
    for (Var x : spec_.x_vars) allowed.insert(x);

    std::vector<Var> used;
    for (Var v : core_vars)
        if (v != y_k && allowed.count(v)) used.push_back(v);
    if (used.empty()) {
        // Weakest sound repair: the whole input cube of the counterexample.
        used = spec_.x_vars;
    }

    std::vector<ExprRef> cube;
    cube.reserve(used.size());
    for (Var v : used) {
        ExprRef r = arena_.var(v);
        cube.push_back(sigma.value(v) ? r : arena_.negate(r));
    }
    ExprRef beta = arena_.mk_and(std::move(cube));

    bool target_was_one = sigma.value(prime_map.at(y_k));
    ExprRef f = psi_.at(y_k);
    psi_[y_k] = target_was_one ? arena_.mk_and(f, arena_.negate(beta))
                               : arena_.mk_or(f, beta);

    // Non-repetition bookkeeping: one (y, X-and-Y-hat cube) may be repaired
    // at most once per run.
    std::ostringstream key;
    key << y_k << '|';
    for (Var x : spec_.x_vars) key << (sigma.value(x) ? '1' : '0');
    for (Var y : yh) key << (sigma.value(y) ? '1' : '0');
    if (!repair_keys_.insert(key.str()).second) ++stats_.convergence_violations;

    // The repaired function must flip at the counterexample point.
    Assignment point;
    for (Var v : arena_.vars_of(psi_.at(y_k))) point.set(v, sigma.value(v));
    if (arena_.eval(psi_.at(y_k), point) != !target_was_one)
        throw std::logic_error("repair failed to flip function output at counterexample");

    ++stats_.refine_count[y_k];
    ++stats_.total_repairs;
}

int Refiner::process_worklist(std::vector<Var> ind, Assignment& sigma,
                              const std::map<Var, Var>& prime_map, int iter_id) {
    // `pending` dedups waiting entries only: a variable processed through the
    // SAT branch may re-enter when a later repair query's model disagrees on
    // it again (its G_k context has changed through the sigma rewrites).
    // Variables repaired in this call stay out; their function already flips
    // at this counterexample. Appends go from later total-order positions to
    // earlier ones, so the worklist is finite; the cap is belt-and-braces.
    std::set<Var> pending(ind.begin(), ind.end());
    std::set<Var> repaired;
    const size_t item_cap = 4 * (spec_.y_vars.size() + 1) * (spec_.y_vars.size() + 1);
    int repairs = 0;
    std::vector<std::pair<Var, const char*>> kinds;

    for (size_t i = 0; i < ind.size() && i < item_cap; ++i) {
        Var y_k = ind[i];
        pending.erase(y_k);
        if (self_substituted_.count(y_k) || repaired.count(y_k)) continue;

        if (check_substitute(y_k)) {
            std::vector<Var> yh = y_hat(y_k);
            psi_[y_k] = self_substitute_expr(spec_.matrix, arena_, y_k, spec_,
                                             std::set<Var>(yh.begin(), yh.end()));
            self_substituted_.insert(y_k);
            stats_.self_substituted.push_back(y_k);
            if (psi_[y_k] == arena_.const0() && diag_)
                *diag_ << "self-substitution of y" << y_k << " degenerated to constant false\n";
            kinds.push_back({y_k, "self-sub"});
            ++repairs;
            ++stats_.total_repairs;
            continue;
        }

        SatOutcome o = gk_solver_.solve(build_gk_assumptions(sigma, y_k, prime_map));
        if (o.status == SolveStatus::Unknown)
            throw std::runtime_error("solver budget exhausted in repair query");
        if (o.status == SolveStatus::Unsat) {
            std::vector<Var> core_vars;
            for (Lit l : o.core) core_vars.push_back(l.var());
            std::sort(core_vars.begin(), core_vars.end());
            core_vars.erase(std::unique(core_vars.begin(), core_vars.end()), core_vars.end());
            apply_repair(y_k, core_vars, sigma, prime_map);
            repaired.insert(y_k);
            kinds.push_back({y_k, "unsat-core"});
            ++repairs;
        } else {
            std::vector<Var> yh = y_hat(y_k);
            std::set<Var> in_yhat(yh.begin(), yh.end());
            for (Var y_t : spec_.y_vars) {
                if (y_t == y_k || in_yhat.count(y_t) || self_substituted_.count(y_t) ||
                    repaired.count(y_t))
                    continue;
                if (o.model.value(y_t) != sigma.value(prime_map.at(y_t)) && !pending.count(y_t)) {
                    ind.push_back(y_t);
                    pending.insert(y_t);
                }
            }
            sigma.set(y_k, sigma.value(prime_map.at(y_k)));
            kinds.push_back({y_k, "sat-propagate"});
        }
    }

    if (diag_) {
        *diag_ << "refine iter=" << iter_id << " ind=[";
        for (size_t i = 0; i < ind.size(); ++i) *diag_ << (i ? "," : "") << 'y' << ind[i];
        *diag_ << "]";
        for (auto& [y, kind] : kinds) *diag_ << ' ' << 'y' << y << ':' << kind;
        *diag_ << '\n';
    }
    if (diag_json_) {
        *diag_json_ << "{\"iter\":" << iter_id << ",\"ind\":[";
        for (size_t i = 0; i < ind.size(); ++i) *diag_json_ << (i ? "," : "") << ind[i];
        *diag_json_ << "],\"repairs\":[";
        for (size_t i = 0; i < kinds.size(); ++i) {
            *diag_json_ << (i ? "," : "") << "{\"y\":" << kinds[i].first << ",\"kind\":\""
                        << kinds[i].second << "\"}";
        }
        *diag_json_ << "]}\n";
    }
    return repairs;
}

RefineStatus Refiner::refine_skf(Assignment& sigma, const std::map<Var, Var>& prime_map,
                                 int iter_id) {
    // The first pass almost always repairs something. The SAT branch mutates
    // sigma toward the candidates' outputs, so re-localizing and retrying is
    // productive when it does not; a bounded number of retries guards the
    // progress guarantee.
    size_t max_passes = spec_.y_vars.size() + 1;
    for (size_t pass = 0; pass < max_passes; ++pass) {
        std::vector<Var> ind = cfg_.localization == LocalizationMode::MaxSat
                                   ? fault_localize(sigma, prime_map)
                                   : naive_localize(sigma, prime_map);
        if (process_worklist(std::move(ind), sigma, prime_map, iter_id) > 0)
            return RefineStatus::Progress;
    }
    return RefineStatus::Stuck;
}

}  // namespace skolem
