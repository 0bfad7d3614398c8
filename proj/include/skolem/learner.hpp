#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "skolem/expr.hpp"
#include "skolem/sampler.hpp"
#include "skolem/types.hpp"

namespace skolem {

struct Hyperparams {
    double min_impurity_decrease = 0.005;
    std::optional<int> max_depth;
};

// Gini impurity of a binary label multiset: 1 - p0^2 - p1^2, in [0, 0.5].
double gini_impurity(size_t zeros, size_t ones);
// Impurity of the parent minus the sample-fraction-weighted mean of the
// children's impurities; never negative for a real split.
double gini_decrease(size_t z, size_t o, size_t lz, size_t lo, size_t rz, size_t ro);

// Binary decision tree over 0/1-valued features. Features on a root-to-leaf
// path are distinct.
class DecisionTree {
public:
    struct Node {
        Var feature = 0;  // internal nodes only
        int low = -1;     // child for feature = 0
        int high = -1;    // child for feature = 1
        int8_t label = -1;  // >= 0 marks a leaf
    };

    int root() const { return root_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    size_t node_count() const { return nodes_.size(); }
    bool single_node() const { return nodes_.size() == 1; }

    int classify(const std::function<bool(Var)>& value) const;

    // Disjunction of all root-to-leaf paths ending in a 1-leaf; each path is
    // the conjunction of its branch literals. No 1-leaves gives false; a
    // 1-leaf root gives true.
    ExprRef extract_function(ExprArena& arena) const;

    void write_dot(std::ostream& out) const;

    static DecisionTree build(const std::vector<std::vector<uint8_t>>& rows,
                              const std::vector<Var>& features,
                              const std::vector<uint8_t>& labels, const Hyperparams& h);

private:
    int add_node(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    std::vector<Node> nodes_;
    int root_ = 0;

    friend class TreeBuilder;
};

// ID3 with Gini impurity: at each node the split with the maximum impurity
// decrease wins, ties to the lowest feature index; growth stops on purity,
// feature exhaustion, or best decrease below the threshold. Leaf labels are
// the majority, ties to 1; an empty training set yields a single 1-leaf.
// `features` must be sorted ascending; rows are aligned with it.
DecisionTree build_tree(const std::vector<std::vector<uint8_t>>& rows,
                        const std::vector<Var>& features, const std::vector<uint8_t>& labels,
                        const Hyperparams& h);

// Dependency sets: d[y] holds every output y (transitively) depends on.
// Kept globally transitively closed after each update.
struct DependencySets {
    std::map<Var, std::set<Var>> d;

    const std::set<Var>& of(Var y) const {
        static const std::set<Var> kEmpty;
        auto it = d.find(y);
        return it == d.end() ? kEmpty : it->second;
    }
    bool depends_on(Var a, Var b) const { return of(a).count(b) > 0; }
};

struct CandidateResult {
    ExprRef psi;
    size_t tree_nodes;
};

// Learns a candidate for y_j from the sample set: features are X plus every
// other output whose function does not already depend on y_j; dependencies
// introduced by the learned function are folded into D (with transitive
// closure). Outputs in `excluded_features` (already-eliminated unates, whose
// sample columns carry no signal) never become features.
CandidateResult candidate_skf(const SampleSet& samples, const QbfSpec& spec, Var y_j,
                              DependencySets& deps, ExprArena& arena, const Hyperparams& h,
                              const std::set<Var>& excluded_features = {});

// Deterministic linear extension: an output precedes everything it depends
// on; ties broken by ascending variable index. Throws on a dependency cycle.
std::vector<Var> find_order(const DependencySets& deps, const std::vector<Var>& y_vars);

}  // namespace skolem
