#include "skolem/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

#include "skolem/solver.hpp"

namespace skolem {

namespace {

std::vector<Var> sample_columns(const QbfSpec& spec) {
    std::vector<Var> cols = spec.x_vars;
    std::sort(cols.begin(), cols.end());
    cols.insert(cols.end(), spec.y_vars.begin(), spec.y_vars.end());
    return cols;
}

double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

std::vector<double> bias_table(const QbfSpec& spec, const BiasProfile& profile) {
    std::vector<double> t(spec.matrix.num_vars + 1, -1.0);
    for (Var v : spec.x_vars) t[v] = profile.universal_bias;
    for (Var v : spec.y_vars) t[v] = profile.bias_for(spec, v);
    return t;
}

// Emergency dedup for degenerate draws: when one row dominates more than
// 90% of the set the tree learner sees an almost-constant table, so the
// distinct rows are kept instead. Ordinary duplication is left alone; it
// carries the weighted-sampling signal.
void dedup_if_degenerate(SampleSet& s) {
    if (s.rows.empty()) return;
    std::map<std::vector<uint8_t>, size_t> counts;
    size_t top = 0;
    for (const auto& r : s.rows) top = std::max(top, ++counts[r]);
    if (top * 10 > s.rows.size() * 9 && counts.size() > 1) {
        s.rows.clear();
        for (const auto& [row, cnt] : counts) s.rows.push_back(row);
    }
}

}  // namespace

double SampleSet::frequency(Var v, bool value) const {
    if (rows.empty()) return 0.0;
    int col = column_of(v);
    assert(col >= 0);
    size_t hits = 0;
    for (const auto& r : rows)
        if ((r[col] == 1) == value) ++hits;
    return static_cast<double>(hits) / static_cast<double>(rows.size());
}

int SampleSet::column_of(Var v) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == v) return static_cast<int>(i);
    return -1;
}

void SampleSet::write_csv(std::ostream& out) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << 'v' << columns[i];
    }
    out << '\n';
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) out << ',';
            out << static_cast<int>(r[i]);
        }
        out << '\n';
    }
}

SampleSet draw(const QbfSpec& spec, const BiasProfile& profile, int n, uint64_t seed,
               const SamplerConfig& cfg) {
    SampleSet out;
    out.columns = sample_columns(spec);
    if (n <= 0) return out;

    std::mt19937_64 rng(seed);
    std::vector<double> table = bias_table(spec, profile);

    if (!cfg.force_cdcl) {
        EnumerateResult en = enumerate_models(spec.matrix, cfg.exact_enum_cap, seed);
        if (!en.capped) {
            if (en.models.empty()) return out;
            // Exact weighted draw: Pr[model] proportional to the product of
            // its literal weights. Log-space keeps long products sane.
            std::vector<double> logw(en.models.size());
            double maxlw = -1e300;
            for (size_t i = 0; i < en.models.size(); ++i) {
                double lw = 0.0;
                for (Var v : out.columns) {
                    double b = table[v];
                    lw += std::log(en.models[i].value(v) ? b : 1.0 - b);
                }
                logw[i] = lw;
                maxlw = std::max(maxlw, lw);
            }
            std::vector<double> cum(en.models.size());
            double total = 0.0;
            for (size_t i = 0; i < logw.size(); ++i) {
                total += std::exp(logw[i] - maxlw);
                cum[i] = total;
            }
            for (int k = 0; k < n; ++k) {
                double r = uniform01(rng) * total;
                size_t idx = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
                if (idx >= en.models.size()) idx = en.models.size() - 1;
                std::vector<uint8_t> row(out.columns.size());
                for (size_t c = 0; c < out.columns.size(); ++c)
                    row[c] = en.models[idx].value(out.columns[c]) ? 1 : 0;
                out.rows.push_back(std::move(row));
            }
            dedup_if_degenerate(out);
            return out;
        }
    }

    Solver s(rng());
    s.add_cnf(spec.matrix);
    s.ensure_vars(spec.matrix.num_vars);
    s.set_conflict_budget(cfg.conflict_budget);
    for (int k = 0; k < n; ++k) {
        SatOutcome o = s.sample(table);
        if (o.status != SolveStatus::Sat) return out;  // unsat (or budget): no rows
        std::vector<uint8_t> row(out.columns.size());
        for (size_t c = 0; c < out.columns.size(); ++c)
            row[c] = o.model.value(out.columns[c]) ? 1 : 0;
        assert(eval_cnf(spec.matrix, o.model) == 1);
        out.rows.push_back(std::move(row));
    }
    dedup_if_degenerate(out);
    return out;
}

ProbeResult probe(const QbfSpec& spec, const SamplerConfig& cfg, uint64_t seed) {
    ProbeResult res;
    BiasProfile high, low;
    for (Var y : spec.y_vars) {
        high.q[y] = 0.9;
        low.q[y] = 0.1;
    }
    res.sigma1 = draw(spec, high, cfg.n_probe, seed * 2 + 1, cfg);
    res.sigma2 = draw(spec, low, cfg.n_probe, seed * 2 + 2, cfg);
    res.unsat = res.sigma1.rows.empty() && res.sigma2.rows.empty();
    return res;
}

BiasProfile adapt_bias(const QbfSpec& spec, const ProbeResult& probes, const SamplerConfig& cfg) {
    BiasProfile profile;
    for (Var y : spec.y_vars) {
        if (probes.sigma1.rows.empty()) {
            profile.q[y] = 0.9;
            continue;
        }
        double m = probes.sigma1.frequency(y, true);
        double n;
        if (cfg.nj_mode == NjMode::Sigma1)
            n = probes.sigma1.frequency(y, false);
        else
            n = probes.sigma2.rows.empty() ? 0.0 : probes.sigma2.frequency(y, true);
        bool stable = m > 0.35 && m < 0.65 && n > 0.35 && n < 0.65;
        profile.q[y] = stable ? m : 0.9;
    }
    return profile;
}

GetSamplesResult get_samples(const QbfSpec& spec, int n, const SamplerConfig& cfg, uint64_t seed) {
    GetSamplesResult res;
    ProbeResult probes = probe(spec, cfg, seed);
    if (probes.unsat) {
        res.unsat = true;
        res.samples.columns = sample_columns(spec);
        return res;
    }
    res.profile = adapt_bias(spec, probes, cfg);
    res.samples = draw(spec, res.profile, n, seed * 2 + 3, cfg);
    for (Var y : spec.y_vars) {
        res.samples.meta_m[y] = probes.sigma1.frequency(y, true);
        res.samples.meta_n[y] = cfg.nj_mode == NjMode::Sigma1 ? probes.sigma1.frequency(y, false)
                                                              : probes.sigma2.frequency(y, true);
    }
    return res;
}

int default_sample_count(size_t num_y) {
    if (num_y < 1200) return 10000;
    if (num_y <= 4000) return 5000;
    return 1000;
}

}  // namespace skolem
