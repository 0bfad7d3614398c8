#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "skolem/sampler.hpp"

using namespace skolem;

namespace {

QbfSpec or3_spec() {
    // F = (x1 or x2 or y1)
    QbfSpec s;
    s.x_vars = {1, 2};
    s.y_vars = {3};
    s.matrix.num_vars = 3;
    s.matrix.add_clause({Lit(1, false), Lit(2, false), Lit(3, false)});
    return s;
}

QbfSpec unsat_spec() {
    QbfSpec s;
    s.x_vars = {};
    s.y_vars = {1};
    s.matrix.num_vars = 1;
    s.matrix.add_clause({Lit(1, false)});
    s.matrix.add_clause({Lit(1, true)});
    return s;
}

}  // namespace

TEST_CASE("forced variable appears in every probe row") {
    QbfSpec s;
    s.x_vars = {};
    s.y_vars = {1};
    s.matrix.num_vars = 1;
    s.matrix.add_clause({Lit(1, false)});  // F = (y1)
    SamplerConfig cfg;
    cfg.n_probe = 200;
    ProbeResult p = probe(s, cfg, 1);
    REQUIRE(!p.unsat);
    CHECK(p.sigma1.frequency(1, true) == 1.0);
    CHECK(p.sigma2.frequency(1, true) == 1.0);
}

TEST_CASE("probe separates the two biases on (x1 or x2 or y1)") {
    // Exact weighted distributions: P(y1=1) = 4q / (4q + 3(1-q)),
    // 0.923 at q=0.9 and 0.129 at q=0.1; at n=500 the 99% bands never touch.
    QbfSpec s = or3_spec();
    SamplerConfig cfg;
    ProbeResult p = probe(s, cfg, 17);
    REQUIRE(!p.unsat);
    double f1 = p.sigma1.frequency(3, true);
    double f2 = p.sigma2.frequency(3, true);
    CHECK(f1 > 0.85);
    CHECK(f2 < 0.25);
    CHECK(f1 > f2);
}

TEST_CASE("unsat matrix: empty probes flagged") {
    SamplerConfig cfg;
    ProbeResult p = probe(unsat_spec(), cfg, 1);
    CHECK(p.unsat);
    CHECK(p.sigma1.rows.empty());
    CHECK(p.sigma2.rows.empty());
}

TEST_CASE("adapt_bias band rule") {
    QbfSpec s = or3_spec();
    SamplerConfig cfg;

    auto mk_probe = [&](double m, double n) {
        ProbeResult p;
        p.sigma1.columns = {1, 2, 3};
        p.sigma2.columns = {1, 2, 3};
        for (int i = 0; i < 100; ++i) {
            p.sigma1.rows.push_back({1, 1, static_cast<uint8_t>(i < m * 100 ? 1 : 0)});
            p.sigma2.rows.push_back({1, 1, static_cast<uint8_t>(i < n * 100 ? 1 : 0)});
        }
        return p;
    };

    CHECK(adapt_bias(s, mk_probe(0.5, 0.5), cfg).q.at(3) == doctest::Approx(0.5));
    CHECK(adapt_bias(s, mk_probe(0.75, 0.5), cfg).q.at(3) == doctest::Approx(0.9));
    CHECK(adapt_bias(s, mk_probe(0.4, 0.6), cfg).q.at(3) == doctest::Approx(0.4));
    // one-sided instability also rejects
    CHECK(adapt_bias(s, mk_probe(0.4, 0.8), cfg).q.at(3) == doctest::Approx(0.9));

    // Literal reading of the published routine: n_j from the first probe's
    // zero count, which makes the second band redundant.
    SamplerConfig lit_cfg;
    lit_cfg.nj_mode = NjMode::Sigma1;
    CHECK(adapt_bias(s, mk_probe(0.4, 0.99), lit_cfg).q.at(3) == doctest::Approx(0.4));
}

TEST_CASE("forced function frequency lands outside the band") {
    // y1 <-> (x1 or x2): y1 is determined by X, and under the 0.9-biased
    // weighted distribution its frequency is 27/28 (0.675/0.7); under a
    // uniform-X marginal it would be 0.75. Either way it falls outside
    // (0.35, 0.65), so the adaptive rule keeps q at 0.9.
    QbfSpec s;
    s.x_vars = {1, 2};
    s.y_vars = {3};
    s.matrix.num_vars = 3;
    s.matrix.add_clause({Lit(3, true), Lit(1, false), Lit(2, false)});
    s.matrix.add_clause({Lit(3, false), Lit(1, true)});
    s.matrix.add_clause({Lit(3, false), Lit(2, true)});
    SamplerConfig cfg;
    cfg.n_probe = 2000;
    ProbeResult p = probe(s, cfg, 5);
    double m = p.sigma1.frequency(3, true);
    CHECK(m > 0.65);
    CHECK(m == doctest::Approx(27.0 / 28.0).epsilon(0.03));
    BiasProfile prof = adapt_bias(s, p, cfg);
    CHECK(prof.q.at(3) == doctest::Approx(0.9));
}

TEST_CASE("draw basics") {
    QbfSpec s = or3_spec();
    SamplerConfig cfg;
    BiasProfile prof;
    prof.q[3] = 0.1;

    SampleSet empty = draw(s, prof, 0, 1, cfg);
    CHECK(empty.rows.empty());
    CHECK(empty.columns == std::vector<Var>{1, 2, 3});

    SampleSet low = draw(s, prof, 2000, 1, cfg);
    CHECK(low.frequency(3, true) < 4.0 / 7.0 - 0.029);
    for (const auto& row : low.rows) {
        Assignment a;
        for (size_t c = 0; c < low.columns.size(); ++c) a.set(low.columns[c], row[c]);
        CHECK(eval_cnf(s.matrix, a) == 1);
    }
}

TEST_CASE("cdcl draw path also respects the bias direction") {
    QbfSpec s = or3_spec();
    SamplerConfig cfg;
    cfg.force_cdcl = true;
    BiasProfile low, high;
    low.q[3] = 0.1;
    high.q[3] = 0.9;
    CHECK(draw(s, low, 2000, 3, cfg).frequency(3, true) < 4.0 / 7.0 - 0.029);
    CHECK(draw(s, high, 2000, 3, cfg).frequency(3, true) > 4.0 / 7.0 + 0.029);
}

TEST_CASE("fixed seed gives byte-identical sample sets") {
    QbfSpec s = or3_spec();
    SamplerConfig cfg;
    BiasProfile prof;
    prof.q[3] = 0.4;
    for (bool force_cdcl : {false, true}) {
        cfg.force_cdcl = force_cdcl;
        std::ostringstream a, b;
        draw(s, prof, 500, 77, cfg).write_csv(a);
        draw(s, prof, 500, 77, cfg).write_csv(b);
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("monotone bias response for a free variable") {
    QbfSpec s;
    s.x_vars = {1};
    s.y_vars = {2};
    s.matrix.num_vars = 2;
    SamplerConfig cfg;
    double prev = -1.0;
    for (double q : {0.2, 0.5, 0.8}) {
        BiasProfile prof;
        prof.q[2] = q;
        double f = draw(s, prof, 2000, 13, cfg).frequency(2, true);
        CHECK(f == doctest::Approx(q).epsilon(0.15));
        CHECK(f > prev - 0.03);  // 99% band slack
        prev = f;
    }
}

TEST_CASE("get_samples end-to-end carries probe statistics") {
    QbfSpec s = or3_spec();
    SamplerConfig cfg;
    GetSamplesResult g = get_samples(s, 1000, cfg, 23);
    REQUIRE(!g.unsat);
    CHECK(g.samples.rows.size() == 1000);
    CHECK(g.samples.meta_m.count(3) == 1);
    CHECK(g.samples.meta_n.count(3) == 1);
    // y1 is unstable under the probes, so q falls back to 0.9.
    CHECK(g.profile.q.at(3) == doctest::Approx(0.9));

    GetSamplesResult u = get_samples(unsat_spec(), 100, cfg, 23);
    CHECK(u.unsat);
    CHECK(u.samples.rows.empty());
}

TEST_CASE("sample count tiers") {
    CHECK(default_sample_count(3) == 10000);
    CHECK(default_sample_count(1199) == 10000);
    CHECK(default_sample_count(1200) == 5000);
    CHECK(default_sample_count(4000) == 5000);
    CHECK(default_sample_count(4001) == 1000);
}

TEST_CASE("csv dump shape") {
    SampleSet s;
    s.columns = {1, 3};
    s.rows = {{1, 0}, {0, 1}};
    std::ostringstream ss;
    s.write_csv(ss);
    CHECK(ss.str() == "v1,v3\n1,0\n0,1\n");
}
