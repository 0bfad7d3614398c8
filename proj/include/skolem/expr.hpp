#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "skolem/types.hpp"

namespace skolem {

// Index into an ExprArena. Structurally identical expressions share one ref.
using ExprRef = int32_t;

enum class ExprKind : uint8_t { Const0, Const1, VarRef, Not, And, Or };

// Shared-subterm Boolean expression DAG with hash-consing. Construction
// canonicalizes: Not(Not(e)) collapses, nested same-operator nodes are
// flattened, children are sorted and deduplicated, constants fold. An arena
// is confined to one synthesis run; refs from different arenas must not mix.
class ExprArena {
public:
    ExprArena();

    ExprRef const0() const { return 0; }
    ExprRef const1() const { return 1; }
    ExprRef constant(bool b) const { return b ? 1 : 0; }
    ExprRef var(Var v);
    ExprRef negate(ExprRef e);
    ExprRef mk_and(std::vector<ExprRef> children);
    ExprRef mk_or(std::vector<ExprRef> children);
    ExprRef mk_and(ExprRef a, ExprRef b) { return mk_and(std::vector<ExprRef>{a, b}); }
    ExprRef mk_or(ExprRef a, ExprRef b) { return mk_or(std::vector<ExprRef>{a, b}); }

    ExprKind kind(ExprRef e) const { return nodes_[e].kind; }
    Var var_of(ExprRef e) const { return nodes_[e].var; }
    ExprRef child(ExprRef e) const { return children_[nodes_[e].begin]; }
    std::vector<ExprRef> children(ExprRef e) const;
    size_t size() const { return nodes_.size(); }

    // Standard Boolean evaluation, memoized over shared nodes.
    // Throws on a variable unbound in `a`.
    bool eval(ExprRef e, const Assignment& a) const;

    // Every VarRef(v) replaced by g; sharing preserved.
    ExprRef substitute(ExprRef e, Var v, ExprRef g);

    // Variable renaming through `map` (identity where map returns the input).
    ExprRef map_vars(ExprRef e, const std::function<Var(Var)>& map);

    // Set of variables appearing under e, ascending.
    std::vector<Var> vars_of(ExprRef e) const;

    // Appends defining clauses for fresh sink variables (full biconditional
    // encoding) and returns a literal equivalent to e. Fresh variables come
    // from sink.new_var(), strictly above existing indices.
    Lit tseitin(ExprRef e, CnfFormula& sink) const;

    // Parenthesized prefix notation over and/or/not/true/false/x<i>.
    std::string to_string(ExprRef e) const;
    void print(ExprRef e, std::ostream& out) const;

private:
    struct Node {
        ExprKind kind;
        Var var = 0;          // VarRef only
        uint32_t begin = 0;   // children range in children_
        uint32_t count = 0;
    };

    ExprRef intern(ExprKind kind, Var v, std::vector<ExprRef>&& kids);
    ExprRef mk_nary(ExprKind op, std::vector<ExprRef> children);
    ExprRef map_rebuild_(ExprRef root, const std::function<ExprRef(ExprRef)>& leaf_fn);

    std::vector<Node> nodes_;
    std::vector<ExprRef> children_;
    std::unordered_map<uint64_t, std::vector<ExprRef>> index_;  // hash -> candidate refs
};

}  // namespace skolem
