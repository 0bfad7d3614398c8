#include "skolem/learner.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <stdexcept>

namespace skolem {

double gini_impurity(size_t zeros, size_t ones) {
    size_t n = zeros + ones;
    if (n == 0) return 0.0;
    double p0 = static_cast<double>(zeros) / n;
    double p1 = static_cast<double>(ones) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

double gini_decrease(size_t z, size_t o, size_t lz, size_t lo, size_t rz, size_t ro) {
    size_t n = z + o;
    if (n == 0) return 0.0;
    double wl = static_cast<double>(lz + lo) / n;
    double wr = static_cast<double>(rz + ro) / n;
    return gini_impurity(z, o) - (wl * gini_impurity(lz, lo) + wr * gini_impurity(rz, ro));
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<uint8_t>>& rows, const std::vector<Var>& features,
                const std::vector<uint8_t>& labels, const Hyperparams& h)
        : rows_(rows), features_(features), labels_(labels), h_(h) {}

    DecisionTree run() {
        DecisionTree t;
        if (rows_.empty()) {
            t.root_ = t.add_node({0, -1, -1, 1});
            return t;
        }
        std::vector<size_t> all(rows_.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::vector<bool> used(features_.size(), false);
        t.root_ = grow(t, all, used, 1, 0);
        return t;
    }

private:
    int grow(DecisionTree& t, const std::vector<size_t>& idx, std::vector<bool>& used,
             int8_t parent_majority, int depth) {
        size_t ones = 0;
        for (size_t i : idx) ones += labels_[i];
        size_t zeros = idx.size() - ones;
        if (idx.empty()) return t.add_node({0, -1, -1, parent_majority});
        int8_t majority = ones >= zeros ? 1 : 0;
        if (ones == 0 || zeros == 0) return t.add_node({0, -1, -1, majority});
        if (h_.max_depth && depth >= *h_.max_depth) return t.add_node({0, -1, -1, majority});

        int best = -1;
        double best_dec = -1.0;
        for (size_t f = 0; f < features_.size(); ++f) {
            if (used[f]) continue;
            size_t lz = 0, lo = 0, rz = 0, ro = 0;
            for (size_t i : idx) {
                if (rows_[i][f]) {
                    ro += labels_[i];
                    rz += 1 - labels_[i];
                } else {
                    lo += labels_[i];
                    lz += 1 - labels_[i];
                }
            }
            double dec = gini_decrease(zeros, ones, lz, lo, rz, ro);
            if (dec > best_dec + 1e-12) {  // strict improvement; first (lowest index) wins ties
                best_dec = dec;
                best = static_cast<int>(f);
            }
        }
        if (best < 0 || best_dec < h_.min_impurity_decrease)
            return t.add_node({0, -1, -1, majority});

        std::vector<size_t> low, high;
        for (size_t i : idx) (rows_[i][best] ? high : low).push_back(i);
        used[best] = true;
        int lo_child = grow(t, low, used, majority, depth + 1);
        int hi_child = grow(t, high, used, majority, depth + 1);
        used[best] = false;
        return t.add_node({features_[best], lo_child, hi_child, -1});
    }

    const std::vector<std::vector<uint8_t>>& rows_;
    const std::vector<Var>& features_;
    const std::vector<uint8_t>& labels_;
    const Hyperparams& h_;
};

DecisionTree build_tree(const std::vector<std::vector<uint8_t>>& rows,
                        const std::vector<Var>& features, const std::vector<uint8_t>& labels,
                        const Hyperparams& h) {
    assert(std::is_sorted(features.begin(), features.end()));
    assert(rows.size() == labels.size());
    return TreeBuilder(rows, features, labels, h).run();
}

DecisionTree DecisionTree::build(const std::vector<std::vector<uint8_t>>& rows,
                                 const std::vector<Var>& features,
                                 const std::vector<uint8_t>& labels, const Hyperparams& h) {
    return build_tree(rows, features, labels, h);
}

int DecisionTree::classify(const std::function<bool(Var)>& value) const {
    int n = root_;
    while (nodes_[n].label < 0) n = value(nodes_[n].feature) ? nodes_[n].high : nodes_[n].low;
    return nodes_[n].label;
}

ExprRef DecisionTree::extract_function(ExprArena& arena) const {
    std::vector<ExprRef> paths;
    std::vector<ExprRef> prefix;
    std::function<void(int)> walk = [&](int n) {
        const Node& node = nodes_[n];
        if (node.label >= 0) {
            if (node.label == 1) paths.push_back(arena.mk_and(prefix));
            return;
        }
        prefix.push_back(arena.negate(arena.var(node.feature)));
        walk(node.low);
        prefix.back() = arena.var(node.feature);
        walk(node.high);
        prefix.pop_back();
    };
    walk(root_);
    return arena.mk_or(std::move(paths));
}

void DecisionTree::write_dot(std::ostream& out) const {
    out << "digraph tree {\n";
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.label >= 0)
            out << "  n" << i << " [shape=box,label=\"" << int(n.label) << "\"];\n";
        else {
            out << "  n" << i << " [label=\"x" << n.feature << "\"];\n";
            out << "  n" << i << " -> n" << n.low << " [label=\"0\"];\n";
            out << "  n" << i << " -> n" << n.high << " [label=\"1\"];\n";
        }
    }
    out << "}\n";
}

CandidateResult candidate_skf(const SampleSet& samples, const QbfSpec& spec, Var y_j,
                              DependencySets& deps, ExprArena& arena, const Hyperparams& h,
                              const std::set<Var>& excluded_features) {
    std::vector<Var> featset = spec.x_vars;
    for (Var y_k : spec.y_vars) {
        if (y_k == y_j || excluded_features.count(y_k)) continue;
        if (!deps.depends_on(y_k, y_j)) featset.push_back(y_k);
    }
    std::sort(featset.begin(), featset.end());

    CandidateResult res;
    if (samples.rows.empty()) {
        // No training data: constant 1, repaired later if wrong.
        res.psi = arena.const1();
        res.tree_nodes = 1;
        return res;
    }

    std::vector<int> cols(featset.size());
    for (size_t f = 0; f < featset.size(); ++f) cols[f] = samples.column_of(featset[f]);
    int label_col = samples.column_of(y_j);
    assert(label_col >= 0);

    std::vector<std::vector<uint8_t>> rows(samples.rows.size());
    std::vector<uint8_t> labels(samples.rows.size());
    for (size_t i = 0; i < samples.rows.size(); ++i) {
        rows[i].resize(featset.size());
        for (size_t f = 0; f < featset.size(); ++f) rows[i][f] = samples.rows[i][cols[f]];
        labels[i] = samples.rows[i][label_col];
    }

    DecisionTree t = build_tree(rows, featset, labels, h);
    res.psi = t.extract_function(arena);
    res.tree_nodes = t.node_count();

    // Fold the function's output references into d_j, then restore global
    // transitive closure: anything that depends on y_j inherits them.
    auto& dj = deps.d[y_j];
    for (Var v : arena.vars_of(res.psi)) {
        if (!spec.is_y(v) || v == y_j) continue;
        dj.insert(v);
        const auto& dk = deps.of(v);
        dj.insert(dk.begin(), dk.end());
    }
    if (!dj.empty()) {
        for (auto& [t_var, dt] : deps.d) {
            if (t_var != y_j && dt.count(y_j)) dt.insert(dj.begin(), dj.end());
        }
    }
    return res;
}

std::vector<Var> find_order(const DependencySets& deps, const std::vector<Var>& y_vars) {
    // pos(a) < pos(b) whenever b is in d[a]: dependencies come later.
    std::map<Var, int> indegree;
    for (Var y : y_vars) indegree[y] = 0;
    for (Var y : y_vars)
        for (Var k : deps.of(y))
            if (indegree.count(k)) ++indegree[k];

    std::vector<Var> order;
    std::vector<Var> remaining = y_vars;
    std::sort(remaining.begin(), remaining.end());
    std::vector<bool> placed(remaining.size(), false);
    for (size_t step = 0; step < remaining.size(); ++step) {
        int pick = -1;
        for (size_t i = 0; i < remaining.size(); ++i) {
            if (!placed[i] && indegree[remaining[i]] == 0) {
                pick = static_cast<int>(i);
                break;
            }
        }
        if (pick < 0) throw std::logic_error("find_order: dependency cycle");
        placed[pick] = true;
        order.push_back(remaining[pick]);
        for (Var k : deps.of(remaining[pick]))
            if (indegree.count(k)) --indegree[k];
    }
    return order;
}

}  // namespace skolem
