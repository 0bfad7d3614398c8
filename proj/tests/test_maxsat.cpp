#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "skolem/maxsat.hpp"

using namespace skolem;

namespace {

CnfFormula cnf(Var nvars, std::initializer_list<std::vector<int>> clauses) {
    CnfFormula f;
    f.num_vars = nvars;
    for (const auto& c : clauses) {
        std::vector<Lit> lits;
        for (int d : c) lits.push_back(Lit::from_dimacs(d));
        f.add_clause(std::move(lits));
    }
    return f;
}

}  // namespace

TEST_CASE("hard unit dominates a contradicting soft") {
    MaxSatQuery q;
    q.hard = cnf(1, {{1}});
    q.soft = {{Lit(1, true), 10}, {Lit(1, false), 11}};
    MaxSatResult r = maxsat(q);
    CHECK(r.falsified == std::vector<Var>{10});
    CHECK(r.model.value(1));
}

TEST_CASE("symmetric optimum falsifies exactly one") {
    MaxSatQuery q;
    q.hard.num_vars = 1;
    q.soft = {{Lit(1, false), 5}, {Lit(1, true), 6}};
    MaxSatResult r = maxsat(q);
    CHECK(r.falsified.size() == 1);
}

TEST_CASE("worked-example localization: only y1 blamed") {
    QbfSpec ex1 = oracle::example1_spec();
    MaxSatQuery q;
    q.hard = ex1.matrix;
    q.hard.add_clause({Lit(1, true)});   // x1 = 0
    q.hard.add_clause({Lit(2, false)});  // x2 = 1
    // candidates' outputs: y1'=0, y2'=0, y3'=1
    q.soft = {{Lit(3, true), 3}, {Lit(4, true), 4}, {Lit(5, false), 5}};
    MaxSatResult r = maxsat(q);
    CHECK(r.falsified == std::vector<Var>{3});
}

TEST_CASE("hard-unsat signals a caller bug") {
    MaxSatQuery q;
    q.hard = cnf(1, {{1}, {-1}});
    q.soft = {{Lit(1, false), 1}};
    CHECK_THROWS_AS(maxsat(q), HardUnsatError);
}

TEST_CASE("no softs reduces to plain solving") {
    MaxSatQuery q;
    q.hard = cnf(2, {{1, 2}});
    MaxSatResult r = maxsat(q);
    CHECK(r.falsified.empty());
    CHECK(eval_cnf(q.hard, r.model) == 1);
}

TEST_CASE("optimum equals brute force on random instances") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 200; ++t) {
        Var n = 3 + static_cast<Var>(rng() % 8);  // <= 10 vars
        CnfFormula hard = oracle::random_cnf(rng, n, 1 + static_cast<int>(rng() % n), 3);
        if (oracle::truth_table_models(hard).empty()) continue;
        int num_soft = 1 + static_cast<int>(rng() % 6);
        MaxSatQuery q;
        q.hard = hard;
        std::vector<Lit> soft_lits;
        for (int i = 0; i < num_soft; ++i) {
            Lit l(1 + static_cast<Var>(rng() % n), rng() & 1);
            q.soft.push_back({l, static_cast<Var>(100 + i)});
            soft_lits.push_back(l);
        }
        q.seed = t + 1;
        MaxSatResult r = maxsat(q);
        int optimum = oracle::maxsat_optimum_naive(hard, soft_lits);
        REQUIRE(optimum >= 0);
        CHECK(static_cast<int>(r.falsified.size()) == optimum);
        // hard clauses hold and falsified matches the model exactly
        CHECK(eval_cnf(hard, r.model) == 1);
        std::vector<Var> violated;
        for (const SoftLit& sl : q.soft)
            if (!r.model.value(sl.lit)) violated.push_back(sl.tag);
        CHECK(violated == r.falsified);
    }
}

TEST_CASE("tie-break prefers earlier softs; reversed flag flips it") {
    MaxSatQuery q;
    q.hard = cnf(2, {{1, 2}, {-1, -2}});  // exactly one of a, b
    q.soft = {{Lit(1, false), 1}, {Lit(2, false), 2}};
    MaxSatResult fwd = maxsat(q);
    CHECK(fwd.falsified == std::vector<Var>{2});
    q.reverse_tie_break = true;
    MaxSatResult rev = maxsat(q);
    CHECK(rev.falsified == std::vector<Var>{1});
}

TEST_CASE("wdimacs dump shape") {
    MaxSatQuery q;
    q.hard = cnf(2, {{1, 2}});
    q.soft = {{Lit(1, true), 1}};
    std::ostringstream ss;
    dump_wdimacs(q, ss);
    CHECK(ss.str() == "p wcnf 2 2 2\n2 1 2 0\n1 -1 0\n");
}
