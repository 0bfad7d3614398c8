#pragma once

#include <iosfwd>
#include <vector>

#include "skolem/solver.hpp"
#include "skolem/types.hpp"

namespace skolem {

// One unit soft constraint: the literal to satisfy plus an identifying tag.
// Tags are distinct across the soft list.
struct SoftLit {
    Lit lit;
    Var tag;
};

struct MaxSatQuery {
    CnfFormula hard;
    std::vector<SoftLit> soft;
    // Tie-break among equally optimal solutions: by default earlier-listed
    // softs are preferred satisfied; reversed order exists for property
    // tests that assert refinement does not depend on the choice.
    bool reverse_tie_break = false;
    uint64_t seed = 1;
};

struct MaxSatResult {
    Assignment model;              // satisfies all hard clauses
    std::vector<Var> falsified;    // tags of violated softs, in soft-list order
};

// Thrown when the hard part is unsatisfiable; callers construct queries
// whose hard part is satisfiable by design, so this signals a caller bug.
class HardUnsatError : public std::logic_error {
public:
    HardUnsatError() : std::logic_error("maxsat: hard clauses unsatisfiable") {}
};

// Maximizes the number of satisfied softs. Strategy: core-guided linear
// search (assume all remaining softs; on UNSAT drop the lowest-tagged core
// member) for an upper bound, then a descending cardinality check over a
// totalizer layer proves optimality, then the tie-break pass fixes the
// preferred optimum.
MaxSatResult maxsat(const MaxSatQuery& q);

// WDIMACS dump of the query for external cross-checks.
void dump_wdimacs(const MaxSatQuery& q, std::ostream& out);

}  // namespace skolem
