#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "skolem/types.hpp"

namespace skolem {

// Per-variable sampling weights: probability of the positive literal at a
// decision. Universals share one weight, each existential has its own.
struct BiasProfile {
    double universal_bias = 0.5;
    std::map<Var, double> q;

    double bias_for(const QbfSpec& spec, Var v) const {
        auto it = q.find(v);
        if (it != q.end()) return it->second;
        (void)spec;
        return universal_bias;
    }
};

// Row-major training data: satisfying assignments restricted to the listed
// columns (X ascending, then Y in prefix order). Probe statistics m/n are
// carried along for diagnostics.
struct SampleSet {
    std::vector<Var> columns;
    std::vector<std::vector<uint8_t>> rows;
    std::map<Var, double> meta_m;
    std::map<Var, double> meta_n;

    double frequency(Var v, bool value) const;
    void write_csv(std::ostream& out) const;
    int column_of(Var v) const;
};

enum class NjMode { Sigma2, Sigma1 };

struct SamplerConfig {
    int n_probe = 500;
    NjMode nj_mode = NjMode::Sigma2;
    // Below this model count the drawing is exact: every model enumerated
    // and sampled with probability proportional to its literal-weight
    // product. Above it, biased-polarity CDCL sampling takes over.
    int64_t exact_enum_cap = 50'000;
    bool force_cdcl = false;
    int64_t conflict_budget = 10'000'000;
};

struct ProbeResult {
    SampleSet sigma1;  // Bias(0.5, 0.9)
    SampleSet sigma2;  // Bias(0.5, 0.1)
    bool unsat = false;
};

// Two probe draws with existential bias 0.9 and 0.1. An unsatisfiable
// matrix yields empty sets with the unsat flag raised.
ProbeResult probe(const QbfSpec& spec, const SamplerConfig& cfg, uint64_t seed);

// q_j is the probe-1 frequency m_j when both m_j and n_j sit strictly
// inside (0.35, 0.65), else 0.9. n_j comes from the second probe by
// default; NjMode::Sigma1 reads it as the y_j=0 frequency of the first.
BiasProfile adapt_bias(const QbfSpec& spec, const ProbeResult& probes, const SamplerConfig& cfg);

// n rows with the given per-variable bias. Rows are deduplicated only when
// duplicates exceed 90% of the draw.
SampleSet draw(const QbfSpec& spec, const BiasProfile& profile, int n, uint64_t seed,
               const SamplerConfig& cfg);

// Full adaptive pipeline: probe, adapt, draw. meta_m/meta_n are filled from
// the probe statistics.
struct GetSamplesResult {
    SampleSet samples;
    BiasProfile profile;
    bool unsat = false;
};
GetSamplesResult get_samples(const QbfSpec& spec, int n, const SamplerConfig& cfg, uint64_t seed);

// Sample-count tiers by |Y|.
int default_sample_count(size_t num_y);

}  // namespace skolem
