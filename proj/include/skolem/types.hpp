#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace skolem {

// Variables are positive 1-based indices, stable for the lifetime of a
// formula. Fresh auxiliary variables are always allocated above the
// current maximum.
using Var = int32_t;

class Lit {
public:
    Lit() = default;
    Lit(Var v, bool negated) : code_(2 * v + (negated ? 1 : 0)) {}

    Var var() const { return code_ >> 1; }
    bool negated() const { return code_ & 1; }
    int32_t code() const { return code_; }

    Lit operator~() const {
        Lit l;
        l.code_ = code_ ^ 1;
        return l;
    }

    // DIMACS convention: -v means negated v.
    static Lit from_dimacs(int d) { return Lit(d < 0 ? -d : d, d < 0); }
    int to_dimacs() const { return negated() ? -var() : var(); }

    bool operator==(const Lit& o) const { return code_ == o.code_; }
    bool operator!=(const Lit& o) const { return code_ != o.code_; }
    bool operator<(const Lit& o) const { return code_ < o.code_; }

private:
    int32_t code_ = 0;
};

inline Lit mk_lit(Var v) { return Lit(v, false); }

// Total map Var -> {0,1} over its declared domain.
class Assignment {
public:
    Assignment() = default;

    void set(Var v, bool b) {
        if (v >= static_cast<Var>(vals_.size())) vals_.resize(v + 1, -1);
        vals_[v] = b ? 1 : 0;
    }
    void unset(Var v) {
        if (v < static_cast<Var>(vals_.size())) vals_[v] = -1;
    }
    bool has(Var v) const {
        return v > 0 && v < static_cast<Var>(vals_.size()) && vals_[v] >= 0;
    }
    bool value(Var v) const {
        if (!has(v)) throw std::invalid_argument("assignment: unbound variable " + std::to_string(v));
        return vals_[v] == 1;
    }
    bool value(Lit l) const { return value(l.var()) != l.negated(); }

    bool operator==(const Assignment& o) const {
        Var n = std::max(vals_.size(), o.vals_.size());
        for (Var v = 1; v < n; ++v) {
            int8_t a = v < static_cast<Var>(vals_.size()) ? vals_[v] : -1;
            int8_t b = v < static_cast<Var>(o.vals_.size()) ? o.vals_[v] : -1;
            if (a != b) return false;
        }
        return true;
    }

    // Restriction to V; every v in V must be bound.
    Assignment restrict_to(const std::vector<Var>& vs) const {
        Assignment r;
        for (Var v : vs) r.set(v, value(v));
        return r;
    }

    std::vector<Var> domain() const {
        std::vector<Var> d;
        for (Var v = 1; v < static_cast<Var>(vals_.size()); ++v)
            if (vals_[v] >= 0) d.push_back(v);
        return d;
    }

private:
    std::vector<int8_t> vals_;  // -1 unbound
};

// A clause never holds duplicate literals; construction of a tautology
// (both polarities of one variable) yields nullopt and the clause is
// dropped by the caller.
class Clause {
public:
    static std::optional<Clause> make(std::vector<Lit> lits) {
        std::vector<Lit> out;
        out.reserve(lits.size());
        for (Lit l : lits) {
            bool dup = false;
            for (Lit m : out) {
                if (m == l) { dup = true; break; }
                if (m == ~l) return std::nullopt;  // tautology
            }
            if (!dup) out.push_back(l);
        }
        Clause c;
        c.lits_ = std::move(out);
        return c;
    }

    const std::vector<Lit>& lits() const { return lits_; }
    bool empty() const { return lits_.empty(); }
    size_t size() const { return lits_.size(); }

    bool operator==(const Clause& o) const { return lits_ == o.lits_; }

private:
    std::vector<Lit> lits_;
};

struct CnfFormula {
    std::vector<Clause> clauses;
    Var num_vars = 0;

    // Returns false when the clause was a tautology and got dropped.
    bool add_clause(std::vector<Lit> lits) {
        for (Lit l : lits) {
            if (l.var() < 1 || l.var() > num_vars)
                throw std::invalid_argument("literal variable out of range: " + std::to_string(l.var()));
        }
        auto c = Clause::make(std::move(lits));
        if (!c) return false;
        clauses.push_back(std::move(*c));
        return true;
    }

    Var new_var() { return ++num_vars; }

    bool operator==(const CnfFormula& o) const {
        return num_vars == o.num_vars && clauses == o.clauses;
    }
};

// The canonical unsatisfiable CNF: a single empty clause.
inline CnfFormula unsat_cnf(Var num_vars) {
    CnfFormula f;
    f.num_vars = num_vars;
    f.clauses.push_back(*Clause::make({}));
    return f;
}

// 1 iff every clause has a satisfied literal. Scans every literal so an
// unbound occurring variable is always reported, independent of clause
// order.
int eval_cnf(const CnfFormula& f, const Assignment& a);

// F with v fixed to b: satisfied clauses removed, falsified literals of v
// stripped. An emptied clause collapses the result to the canonical
// unsatisfiable CNF.
CnfFormula substitute_const(const CnfFormula& f, Var v, int b);

// Encodes the negation of f (with variables renamed through `rename`) into
// sink: one selector per clause with selector <-> clause, plus a returned
// literal implying that some selector is false. Asserting the returned
// literal yields exactly the models of the negated renamed formula over the
// renamed variables.
Lit negate_cnf(const CnfFormula& f, const std::function<Var(Var)>& rename, CnfFormula& sink);

// The 2-QBF input: exists-quantified Y over a CNF matrix, universal X.
struct QbfSpec {
    CnfFormula matrix;
    std::vector<Var> x_vars;  // sorted ascending
    std::vector<Var> y_vars;  // prefix order of the e-lines

    bool is_y(Var v) const {
        return std::find(y_vars.begin(), y_vars.end(), v) != y_vars.end();
    }
    bool is_x(Var v) const {
        return std::binary_search(x_vars.begin(), x_vars.end(), v);
    }
    // Position of v in y_vars; -1 when v is not existential.
    int y_index(Var v) const {
        for (size_t i = 0; i < y_vars.size(); ++i)
            if (y_vars[i] == v) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const QbfSpec& o) const {
        return matrix == o.matrix && x_vars == o.x_vars && y_vars == o.y_vars;
    }
};

}  // namespace skolem
