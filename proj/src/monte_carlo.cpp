#include "maxtail/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "maxtail/special.hpp"

namespace maxtail {

namespace {

constexpr std::int64_t kChunkSamples = 1 << 16;
constexpr double kZ95 = 1.959963984540054;  // Phi^{-1}(0.975)

// SplitMix64 finalizer; the generator is counter-based: draw j of chunk c
// is fmix64(chunk_key(seed, c) + j * GAMMA).
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t fmix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

struct SubStream {
    std::uint64_t counter;

    SubStream(std::uint64_t seed, std::int64_t chunk)
        : counter(fmix64(seed + kGamma * static_cast<std::uint64_t>(chunk + 1))) {}

    std::uint64_t next_u64() {
        counter += kGamma;
        return fmix64(counter);
    }
    // uniform on (0, 1), never exactly 0 or 1
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    double next_normal() { return std_normal_quantile(next_uniform()); }
};

std::int64_t chunk_count(std::int64_t n_samples) {
    return (n_samples + kChunkSamples - 1) / kChunkSamples;
}

std::int64_t chunk_size(std::int64_t n_samples, std::int64_t chunk) {
    const std::int64_t begin = chunk * kChunkSamples;
    return std::min(kChunkSamples, n_samples - begin);
}

void parallel_chunks(std::int64_t n_chunks, int threads,
                     const std::function<void(std::int64_t)>& work) {
    threads = std::max(1, threads);
    if (threads == 1 || n_chunks == 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) work(c);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto runner = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            work(c);
        }
    };
    std::vector<std::thread> pool;
    const int k = static_cast<int>(
        std::min<std::int64_t>(threads, n_chunks));
    pool.reserve(k);
    for (int i = 0; i < k; ++i) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
}

enum class SamplePath { dense, equicorrelated, fast_max };

struct SampleEngine {
    SamplePath path;
    int n = 0;
    double sqrt_rho = 0.0;
    double sqrt_comp = 0.0;
    CorrelationModel::SamplingFactor factor;

    explicit SampleEngine(const CorrelationModel& model, bool need_absmax) {
        n = model.dim();
        if (model.is_equicorrelated()) {
            const double rho = model.rho();
            sqrt_rho = std::sqrt(std::max(0.0, rho));
            sqrt_comp = std::sqrt(std::max(0.0, 1.0 - rho));
            path = need_absmax ? SamplePath::equicorrelated
                               : SamplePath::fast_max;
        } else {
            path = SamplePath::dense;
            factor = model.sampling_factor();
        }
    }

    // draws (max, absmax); absmax is NaN on the fast path
    std::pair<double, double> draw(SubStream& rng) const {
        switch (path) {
            case SamplePath::fast_max: {
                const double z0 = rng.next_normal();
                const double u = rng.next_uniform();
                const double q =
                    -std::expm1(std::log(u) / static_cast<double>(n));
                const double max_z = -std_normal_quantile(q);
                return {sqrt_rho * z0 + sqrt_comp * max_z,
                        std::numeric_limits<double>::quiet_NaN()};
            }
            case SamplePath::equicorrelated: {
                const double z0 = rng.next_normal();
                double mx = -std::numeric_limits<double>::infinity();
                double ax = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double x = sqrt_rho * z0 + sqrt_comp * rng.next_normal();
                    mx = std::max(mx, x);
                    ax = std::max(ax, std::fabs(x));
                }
                return {mx, ax};
            }
            case SamplePath::dense: {
                thread_local std::vector<double> z;
                z.resize(factor.cols);
                for (int j = 0; j < factor.cols; ++j) z[j] = rng.next_normal();
                double mx = -std::numeric_limits<double>::infinity();
                double ax = 0.0;
                for (int i = 0; i < n; ++i) {
                    double x = 0.0;
                    for (int j = 0; j < factor.cols; ++j)
                        x += factor.coeff(i, j) * z[j];
                    mx = std::max(mx, x);
                    ax = std::max(ax, std::fabs(x));
                }
                return {mx, ax};
            }
        }
        return {0.0, 0.0};
    }
};

MonteCarloEstimate proportion_estimate(std::int64_t hits,
                                       std::int64_t n_samples,
                                       std::uint64_t seed) {
    MonteCarloEstimate est;
    est.n_samples = n_samples;
    est.seed = seed;
    const double m = static_cast<double>(n_samples);
    const double p_hat = static_cast<double>(hits) / m;
    est.value = p_hat;
    est.std_error = std::sqrt(p_hat * (1.0 - p_hat) / m);
    if (hits == 0) {
        est.ci_low = 0.0;
        est.ci_high = -std::expm1(std::log(0.05) / m);
        est.ci_method = "clopper-pearson-upper-95";
    } else if (hits == n_samples) {
        est.ci_low = std::exp(std::log(0.05) / m);
        est.ci_high = 1.0;
        est.ci_method = "clopper-pearson-lower-95";
    } else {
        const double z2 = kZ95 * kZ95;
        const double denom = 1.0 + z2 / m;
        const double center = (p_hat + z2 / (2.0 * m)) / denom;
        const double half =
            kZ95 *
            std::sqrt(p_hat * (1.0 - p_hat) / m + z2 / (4.0 * m * m)) / denom;
        est.ci_low = std::max(0.0, center - half);
        est.ci_high = std::min(1.0, center + half);
        est.ci_method = "wilson-95";
    }
    return est;
}

MonteCarloEstimate indicator_estimate(const CorrelationModel& model, double t,
                                      std::int64_t n_samples,
                                      std::uint64_t seed, int threads,
                                      bool small_ball) {
    if (n_samples < 100) {
        throw std::domain_error("monte carlo: requires n_samples >= 100");
    }
    const SampleEngine engine(model, small_ball);
    const std::int64_t chunks = chunk_count(n_samples);
    std::vector<std::int64_t> hits(chunks, 0);
    parallel_chunks(chunks, threads, [&](std::int64_t c) {
        SubStream rng(seed, c);
        const std::int64_t len = chunk_size(n_samples, c);
        std::int64_t h = 0;
        for (std::int64_t i = 0; i < len; ++i) {
            const auto [mx, ax] = engine.draw(rng);
            const double v = small_ball ? ax : mx;
            if (v <= t) ++h;
        }
        hits[c] = h;
    });
    std::int64_t total = 0;
    for (std::int64_t c = 0; c < chunks; ++c) total += hits[c];
    return proportion_estimate(total, n_samples, seed);
}

}  // namespace

std::vector<std::pair<double, double>> sample_batch(
    const CorrelationModel& model, std::int64_t count, std::uint64_t seed) {
    if (count < 1) {
        throw std::domain_error("sample_batch: requires count >= 1");
    }
    const SampleEngine engine(model, /*need_absmax=*/true);
    std::vector<std::pair<double, double>> out(count);
    const std::int64_t chunks = chunk_count(count);
    for (std::int64_t c = 0; c < chunks; ++c) {
        SubStream rng(seed, c);
        const std::int64_t begin = c * kChunkSamples;
        const std::int64_t len = chunk_size(count, c);
        for (std::int64_t i = 0; i < len; ++i) out[begin + i] = engine.draw(rng);
    }
    return out;
}

std::vector<double> sample_max_fast(const CorrelationModel& model,
                                    std::int64_t count, std::uint64_t seed) {
    if (!model.is_equicorrelated()) {
        throw std::invalid_argument(
            "sample_max_fast: only equicorrelated models have the O(1) path");
    }
    if (count < 1) {
        throw std::domain_error("sample_max_fast: requires count >= 1");
    }
    const SampleEngine engine(model, /*need_absmax=*/false);
    std::vector<double> out(count);
    const std::int64_t chunks = chunk_count(count);
    for (std::int64_t c = 0; c < chunks; ++c) {
        SubStream rng(seed, c);
        const std::int64_t begin = c * kChunkSamples;
        const std::int64_t len = chunk_size(count, c);
        for (std::int64_t i = 0; i < len; ++i)
            out[begin + i] = engine.draw(rng).first;
    }
    return out;
}

MonteCarloEstimate estimate_lower_tail(const CorrelationModel& model, double t,
                                       std::int64_t n_samples,
                                       std::uint64_t seed, int threads) {
    return indicator_estimate(model, t, n_samples, seed, threads,
                              /*small_ball=*/false);
}

MonteCarloEstimate estimate_small_ball(const CorrelationModel& model, double t,
                                       std::int64_t n_samples,
                                       std::uint64_t seed, int threads) {
    return indicator_estimate(model, t, n_samples, seed, threads,
                              /*small_ball=*/true);
}

DistributionStatistics estimate_statistics(const CorrelationModel& model,
                                           std::int64_t n_samples,
                                           std::uint64_t seed, int threads,
                                           StatTarget target) {
    if (n_samples < 1000) {
        throw std::domain_error(
            "estimate_statistics: requires n_samples >= 1000");
    }
    const bool absmax = target == StatTarget::abs_maximum;
    const SampleEngine engine(model, absmax);
    std::vector<double> values(n_samples);
    const std::int64_t chunks = chunk_count(n_samples);
    parallel_chunks(chunks, threads, [&](std::int64_t c) {
        SubStream rng(seed, c);
        const std::int64_t begin = c * kChunkSamples;
        const std::int64_t len = chunk_size(n_samples, c);
        for (std::int64_t i = 0; i < len; ++i) {
            const auto [mx, ax] = engine.draw(rng);
            values[begin + i] = absmax ? ax : mx;
        }
    });

    const double m = static_cast<double>(n_samples);
    double sum = 0.0;
    for (const double v : values) sum += v;
    const double mean = sum / m;
    double s2 = 0.0, s4 = 0.0;
    for (const double v : values) {
        const double d = v - mean;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    const double variance = s2 / (m - 1.0);
    const double m4 = s4 / m;

    DistributionStatistics stats;

    stats.mean.value = mean;
    stats.mean.std_error = std::sqrt(variance / m);
    stats.mean.ci_low = mean - kZ95 * stats.mean.std_error;
    stats.mean.ci_high = mean + kZ95 * stats.mean.std_error;
    stats.mean.ci_method = "normal";

    stats.variance.value = variance;
    const double var_of_var =
        std::max(0.0, m4 - variance * variance) / m;
    stats.variance.std_error = std::sqrt(var_of_var);
    stats.variance.ci_low = variance - kZ95 * stats.variance.std_error;
    stats.variance.ci_high = variance + kZ95 * stats.variance.std_error;
    stats.variance.ci_method = "normal";

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto order_stat = [&](std::int64_t rank) {
        rank = std::clamp<std::int64_t>(rank, 1, n_samples);
        return sorted[rank - 1];
    };
    double med;
    if (n_samples % 2 == 1) {
        med = order_stat((n_samples + 1) / 2);
    } else {
        med = 0.5 * (order_stat(n_samples / 2) + order_stat(n_samples / 2 + 1));
    }
    stats.median.value = med;
    const double half_width = 0.5 * kZ95 * std::sqrt(m);
    const std::int64_t lo_rank =
        static_cast<std::int64_t>(std::floor(0.5 * m - half_width));
    const std::int64_t hi_rank =
        static_cast<std::int64_t>(std::ceil(0.5 * m + half_width)) + 1;
    stats.median.ci_low = order_stat(lo_rank);
    stats.median.ci_high = order_stat(hi_rank);
    stats.median.std_error =
        0.25 * (stats.median.ci_high - stats.median.ci_low);
    stats.median.ci_method = "order-statistic-binomial";

    for (MonteCarloEstimate* est :
         {&stats.median, &stats.mean, &stats.variance}) {
        est->n_samples = n_samples;
        est->seed = seed;
    }
    return stats;
}

}  // namespace maxtail
