#include "spde/ergodic.hpp"

#include "spde/csv.hpp"
#include "spde/error.hpp"
#include "spde/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spde {

namespace {

// Neumaier step: s + c carries the running sum with the rounding error kept in c.
inline void neumaier_add(double& s, double& c, double v) noexcept
{
    const double t = s + v;
    if (std::abs(s) >= std::abs(v)) {
        c += (s - t) + v;
    } else {
        c += (v - t) + s;
    }
    s = t;
}

}  // namespace

RunningAverage::RunningAverage(std::size_t batch_size) : batch_size_(std::max<std::size_t>(1, batch_size)) {}

void RunningAverage::add(double value) noexcept
{
    ++count_;
    neumaier_add(sum_, compensation_, value);
    neumaier_add(batch_sum_, batch_compensation_, value);
    if (++batch_fill_ == batch_size_) {
        batch_means_.push_back((batch_sum_ + batch_compensation_) / static_cast<double>(batch_size_));
        batch_sum_ = 0.0;
        batch_compensation_ = 0.0;
        batch_fill_ = 0;
    }
}

double RunningAverage::mean() const noexcept
{
    return count_ == 0 ? 0.0 : (sum_ + compensation_) / static_cast<double>(count_);
}

RunningAverage update_time_average(RunningAverage acc, double value)
{
    acc.add(value);
    return acc;
}

CIEstimate batch_means_ci(double mean, std::span<const double> batch_means)
{
    const std::size_t nb = batch_means.size();
    if (nb < kMinBatches) {
        throw InsufficientBatches("batch means need at least " + std::to_string(kMinBatches) +
                                  " complete batches, got " + std::to_string(nb));
    }
    // Shifted-data variance: deviations from the first batch mean are exactly zero for
    // identical batches, so constant input yields a zero halfwidth without rounding noise.
    const double shift = batch_means.front();
    double sd_sum = 0.0;
    double sd_sq = 0.0;
    for (double b : batch_means) {
        const double d = b - shift;
        sd_sum += d;
        sd_sq += d * d;
    }
    const double ss = std::max(0.0, sd_sq - sd_sum * sd_sum / static_cast<double>(nb));
    const double sd = std::sqrt(ss / static_cast<double>(nb - 1));
    return CIEstimate{mean, kZ95 * sd / std::sqrt(static_cast<double>(nb)), nb};
}

CIEstimate batch_means_ci(const RunningAverage& acc)
{
    return batch_means_ci(acc.mean(), acc.batch_means());
}

std::size_t default_batch_size(std::size_t samples) noexcept
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(samples))));
}

CIEstimate estimate_invariant_functional(const SchemeConfig& cfg, std::span<const std::uint64_t> stream_ids,
                                         const EstimateOptions& opts)
{
    cfg.validate();
    if (stream_ids.empty()) {
        throw InvalidInput("estimate_invariant_functional: need at least one replica");
    }
    if (cfg.steps == 0) {
        throw InvalidInput("estimate_invariant_functional: need at least one step");
    }
    std::vector<std::uint64_t> ids(stream_ids.begin(), stream_ids.end());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw InvalidInput("estimate_invariant_functional: stream ids must be distinct");
    }

    const Scheme scheme(cfg);
    const auto phi = scheme.bind(cfg.functional);
    const std::size_t samples = cfg.steps - cfg.burn_in;
    const std::size_t batch = default_batch_size(samples);

    std::vector<RunningAverage> results(ids.size(), RunningAverage(batch));
    parallel_for(ids.size(), opts.threads, [&](std::size_t r) {
        SchemeConfig replica = cfg;
        replica.stream_id = ids[r];
        RunningAverage acc(batch);
        static_cast<void>(simulate_raw(scheme, replica, [&](std::size_t m, std::span<const double> x) {
            if (m >= cfg.burn_in) {
                acc.add(phi(x));
            }
        }));
        results[r] = std::move(acc);
    });

    double mean = 0.0;
    std::vector<double> pooled;
    for (const auto& acc : results) {
        mean += acc.mean();
        pooled.insert(pooled.end(), acc.batch_means().begin(), acc.batch_means().end());
    }
    mean /= static_cast<double>(results.size());
    return batch_means_ci(mean, pooled);
}

CIEstimate estimate_invariant_functional(const SchemeConfig& cfg, std::size_t replicas,
                                         const EstimateOptions& opts)
{
    std::vector<std::uint64_t> ids(replicas);
    std::iota(ids.begin(), ids.end(), cfg.stream_id);
    return estimate_invariant_functional(cfg, ids, opts);
}

std::string estimate_csv_header()
{
    return "functional,variant,tau,h_or_M,N,burn_in,replicas,mean,halfwidth,seed";
}

std::string estimate_csv_row(const SchemeConfig& cfg, std::size_t replicas, const CIEstimate& est)
{
    return csv::join({cfg.functional.name(), cfg.variant_name(), csv::format(cfg.tau),
                      csv::format(cfg.resolution()), std::to_string(cfg.steps), std::to_string(cfg.burn_in),
                      std::to_string(replicas), csv::format(est.mean), csv::format(est.halfwidth),
                      std::to_string(cfg.seed)});
}

}  // namespace spde
