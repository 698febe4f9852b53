#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maxtail/corr_model.hpp"

// Seeded, reproducible Monte Carlo for tail probabilities and statistics
// of M_n(X) and ||X||_inf. Samples are generated in fixed-size chunks
// whose substreams are keyed by (seed, chunk index), and per-chunk
// results are merged in chunk order, so serial and parallel runs produce
// bit-identical estimates.

namespace maxtail {

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string ci_method;
};

// One (max, absmax) pair per sample. Equicorrelated models use the
// shared-factor representation (one Z0 plus n coordinate draws); dense
// models draw X = A Z with A from sampling_factor.
std::vector<std::pair<double, double>> sample_batch(
    const CorrelationModel& model, std::int64_t count, std::uint64_t seed);

// O(1)-per-sample maxima for equicorrelated models: the iid max is drawn
// by inverse CDF as Phi^{-1}(U^{1/n}).
std::vector<double> sample_max_fast(const CorrelationModel& model,
                                    std::int64_t count, std::uint64_t seed);

// Binomial proportion with a Wilson 95% interval; an exact zero (or
// full) hit count falls back to a one-sided Clopper-Pearson limit.
MonteCarloEstimate estimate_lower_tail(const CorrelationModel& model, double t,
                                       std::int64_t n_samples,
                                       std::uint64_t seed, int threads = 1);
MonteCarloEstimate estimate_small_ball(const CorrelationModel& model, double t,
                                       std::int64_t n_samples,
                                       std::uint64_t seed, int threads = 1);

enum class StatTarget { maximum, abs_maximum };

struct DistributionStatistics {
    MonteCarloEstimate median;
    MonteCarloEstimate mean;
    MonteCarloEstimate variance;
};

// Median (order statistic, binomial-rank CI), mean and variance
// (normal-approximation CIs), all from one sample pass.
DistributionStatistics estimate_statistics(const CorrelationModel& model,
                                           std::int64_t n_samples,
                                           std::uint64_t seed, int threads = 1,
                                           StatTarget target = StatTarget::maximum);

}  // namespace maxtail
