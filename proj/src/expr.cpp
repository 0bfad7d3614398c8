#include "skolem/expr.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>

namespace skolem {

namespace {

uint64_t hash_node(ExprKind kind, Var v, const std::vector<ExprRef>& kids) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t x) {
        h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(static_cast<uint64_t>(kind));
    mix(static_cast<uint64_t>(v));
    for (ExprRef k : kids) mix(static_cast<uint64_t>(k));
    return h;
}

}  // namespace

ExprArena::ExprArena() {
    nodes_.push_back({ExprKind::Const0});
    nodes_.push_back({ExprKind::Const1});
}

std::vector<ExprRef> ExprArena::children(ExprRef e) const {
    const Node& n = nodes_[e];
    return std::vector<ExprRef>(children_.begin() + n.begin, children_.begin() + n.begin + n.count);
}

ExprRef ExprArena::intern(ExprKind kind, Var v, std::vector<ExprRef>&& kids) {
    uint64_t h = hash_node(kind, v, kids);
    auto it = index_.find(h);
    if (it != index_.end()) {
        for (ExprRef cand : it->second) {
            const Node& n = nodes_[cand];
            if (n.kind != kind || n.var != v || n.count != kids.size()) continue;
            bool eq = true;
            for (uint32_t i = 0; i < n.count; ++i)
                if (children_[n.begin + i] != kids[i]) { eq = false; break; }
            if (eq) return cand;
        }
    }
    Node n;
    n.kind = kind;
    n.var = v;
    n.begin = static_cast<uint32_t>(children_.size());
    n.count = static_cast<uint32_t>(kids.size());
    children_.insert(children_.end(), kids.begin(), kids.end());
    nodes_.push_back(n);
    ExprRef ref = static_cast<ExprRef>(nodes_.size() - 1);
    index_[h].push_back(ref);
    return ref;
}

ExprRef ExprArena::var(Var v) {
    assert(v >= 1);
    return intern(ExprKind::VarRef, v, {});
}

ExprRef ExprArena::negate(ExprRef e) {
    switch (kind(e)) {
        case ExprKind::Const0: return const1();
        case ExprKind::Const1: return const0();
        case ExprKind::Not: return child(e);
        default: return intern(ExprKind::Not, 0, {e});
    }
}

ExprRef ExprArena::mk_nary(ExprKind op, std::vector<ExprRef> in) {
    const ExprRef dominant = op == ExprKind::And ? const0() : const1();
    const ExprRef neutral = op == ExprKind::And ? const1() : const0();
    std::vector<ExprRef> flat;
    flat.reserve(in.size());
    for (ExprRef e : in) {
        if (e == dominant) return dominant;
        if (e == neutral) continue;
        if (kind(e) == op) {
            auto ks = children(e);
            flat.insert(flat.end(), ks.begin(), ks.end());
        } else {
            flat.push_back(e);
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) return neutral;
    if (flat.size() == 1) return flat[0];
    return intern(op, 0, std::move(flat));
}

ExprRef ExprArena::mk_and(std::vector<ExprRef> children) { return mk_nary(ExprKind::And, std::move(children)); }
ExprRef ExprArena::mk_or(std::vector<ExprRef> children) { return mk_nary(ExprKind::Or, std::move(children)); }

bool ExprArena::eval(ExprRef root, const Assignment& a) const {
    std::vector<int8_t> memo(nodes_.size(), -1);
    // Explicit stack; DAGs can be deep after repeated refinement.
    std::vector<ExprRef> stack{root};
    while (!stack.empty()) {
        ExprRef e = stack.back();
        if (memo[e] >= 0) { stack.pop_back(); continue; }
        const Node& n = nodes_[e];
        switch (n.kind) {
            case ExprKind::Const0: memo[e] = 0; stack.pop_back(); break;
            case ExprKind::Const1: memo[e] = 1; stack.pop_back(); break;
            case ExprKind::VarRef: memo[e] = a.value(n.var) ? 1 : 0; stack.pop_back(); break;
            case ExprKind::Not: {
                ExprRef c = children_[n.begin];
                if (memo[c] >= 0) { memo[e] = 1 - memo[c]; stack.pop_back(); }
                else stack.push_back(c);
                break;
            }
            case ExprKind::And:
            case ExprKind::Or: {
                bool pending = false;
                int acc = n.kind == ExprKind::And ? 1 : 0;
                for (uint32_t i = 0; i < n.count && !pending; ++i) {
                    ExprRef c = children_[n.begin + i];
                    if (memo[c] < 0) { stack.push_back(c); pending = true; }
                    else acc = n.kind == ExprKind::And ? (acc & memo[c]) : (acc | memo[c]);
                }
                if (!pending) { memo[e] = static_cast<int8_t>(acc); stack.pop_back(); }
                break;
            }
        }
    }
    return memo[root] == 1;
}

ExprRef ExprArena::map_rebuild_(ExprRef root, const std::function<ExprRef(ExprRef)>& leaf_fn) {
    std::unordered_map<ExprRef, ExprRef> memo;
    std::vector<std::pair<ExprRef, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [e, expanded] = stack.back();
        stack.pop_back();
        if (memo.count(e)) continue;
        ExprKind k = kind(e);
        if (k == ExprKind::Const0 || k == ExprKind::Const1 || k == ExprKind::VarRef) {
            memo[e] = leaf_fn(e);
            continue;
        }
        if (!expanded) {
            stack.push_back({e, true});
            for (ExprRef c : children(e)) stack.push_back({c, false});
            continue;
        }
        if (k == ExprKind::Not) {
            memo[e] = negate(memo.at(child(e)));
        } else {
            std::vector<ExprRef> kids;
            for (ExprRef c : children(e)) kids.push_back(memo.at(c));
            memo[e] = k == ExprKind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
    }
    return memo.at(root);
}

ExprRef ExprArena::substitute(ExprRef e, Var v, ExprRef g) {
    return map_rebuild_(e, [&](ExprRef leaf) -> ExprRef {
        if (kind(leaf) == ExprKind::VarRef && var_of(leaf) == v) return g;
        return leaf;
    });
}

ExprRef ExprArena::map_vars(ExprRef e, const std::function<Var(Var)>& map) {
    return map_rebuild_(e, [&](ExprRef leaf) -> ExprRef {
        if (kind(leaf) == ExprKind::VarRef) {
            Var nv = map(var_of(leaf));
            if (nv != var_of(leaf)) return var(nv);
        }
        return leaf;
    });
}

std::vector<Var> ExprArena::vars_of(ExprRef root) const {
    std::vector<bool> visited(nodes_.size(), false);
    std::vector<ExprRef> stack{root};
    std::vector<Var> out;
    while (!stack.empty()) {
        ExprRef e = stack.back();
        stack.pop_back();
        if (visited[e]) continue;
        visited[e] = true;
        const Node& n = nodes_[e];
        if (n.kind == ExprKind::VarRef) out.push_back(n.var);
        for (uint32_t i = 0; i < n.count; ++i) stack.push_back(children_[n.begin + i]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Lit ExprArena::tseitin(ExprRef root, CnfFormula& sink) const {
    std::unordered_map<ExprRef, Lit> memo;
    // Postorder over the DAG.
    std::vector<std::pair<ExprRef, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [e, expanded] = stack.back();
        stack.pop_back();
        if (memo.count(e)) continue;
        const Node& n = nodes_[e];
        if (!expanded) {
            stack.push_back({e, true});
            for (uint32_t i = 0; i < n.count; ++i) stack.push_back({children_[n.begin + i], false});
            continue;
        }
        switch (n.kind) {
            case ExprKind::Const0: {
                Lit t = mk_lit(sink.new_var());
                sink.add_clause({~t});
                memo[e] = t;
                break;
            }
            case ExprKind::Const1: {
                Lit t = mk_lit(sink.new_var());
                sink.add_clause({t});
                memo[e] = t;
                break;
            }
            case ExprKind::VarRef:
                memo[e] = mk_lit(n.var);
                break;
            case ExprKind::Not:
                memo[e] = ~memo.at(children_[n.begin]);
                break;
            case ExprKind::And: {
                Lit t = mk_lit(sink.new_var());
                std::vector<Lit> big{t};
                for (uint32_t i = 0; i < n.count; ++i) {
                    Lit c = memo.at(children_[n.begin + i]);
                    sink.add_clause({~t, c});
                    big.push_back(~c);
                }
                sink.add_clause(std::move(big));
                memo[e] = t;
                break;
            }
            case ExprKind::Or: {
                Lit t = mk_lit(sink.new_var());
                std::vector<Lit> big{~t};
                for (uint32_t i = 0; i < n.count; ++i) {
                    Lit c = memo.at(children_[n.begin + i]);
                    sink.add_clause({t, ~c});
                    big.push_back(c);
                }
                sink.add_clause(std::move(big));
                memo[e] = t;
                break;
            }
        }
    }
    return memo.at(root);
}

void ExprArena::print(ExprRef root, std::ostream& out) const {
    switch (kind(root)) {
        case ExprKind::Const0: out << "false"; return;
        case ExprKind::Const1: out << "true"; return;
        case ExprKind::VarRef: out << 'x' << var_of(root); return;
        case ExprKind::Not:
            out << "(not ";
            print(child(root), out);
            out << ')';
            return;
        case ExprKind::And:
        case ExprKind::Or: {
            out << '(' << (kind(root) == ExprKind::And ? "and" : "or");
            for (ExprRef c : children(root)) {
                out << ' ';
                print(c, out);
            }
            out << ')';
            return;
        }
    }
}

std::string ExprArena::to_string(ExprRef e) const {
    std::ostringstream ss;
    print(e, ss);
    return ss.str();
}

}  // namespace skolem
