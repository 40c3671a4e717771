#pragma once

#include "spde/scheme.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spde {

/// Streaming time average with Neumaier-compensated summation and non-overlapping
/// batch means of a fixed batch size.
class RunningAverage {
public:
    explicit RunningAverage(std::size_t batch_size = 1);

    void add(double value) noexcept;

    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] double sum() const noexcept { return sum_ + compensation_; }
    [[nodiscard]] double mean() const noexcept;
    [[nodiscard]] std::size_t batch_size() const noexcept { return batch_size_; }
    /// Means of the completed batches; a trailing partial batch is not included.
    [[nodiscard]] std::span<const double> batch_means() const noexcept { return batch_means_; }

private:
    std::size_t batch_size_;
    std::size_t count_ = 0;
    double sum_ = 0.0;
    double compensation_ = 0.0;
    double batch_sum_ = 0.0;
    double batch_compensation_ = 0.0;
    std::size_t batch_fill_ = 0;
    std::vector<double> batch_means_;
};

[[nodiscard]] RunningAverage update_time_average(RunningAverage acc, double value);

struct CIEstimate {
    double mean = 0.0;
    double halfwidth = 0.0;  // 95%
    std::size_t batches = 0;

    friend bool operator==(const CIEstimate&, const CIEstimate&) = default;
};

inline constexpr std::size_t kMinBatches = 8;
inline constexpr double kZ95 = 1.959963984540054;

/// Mean of `acc` with halfwidth 1.96 s / sqrt(n_b), s the sample standard deviation of
/// the batch means. Throws InsufficientBatches below kMinBatches.
[[nodiscard]] CIEstimate batch_means_ci(const RunningAverage& acc);

/// Same interval from an explicit mean and a list of batch means.
[[nodiscard]] CIEstimate batch_means_ci(double mean, std::span<const double> batch_means);

/// Batch size floor(sqrt(samples)), at least 1.
[[nodiscard]] std::size_t default_batch_size(std::size_t samples) noexcept;

struct EstimateOptions {
    unsigned threads = 0;
};

/// Replica r runs on stream_ids[r]. Replicas are equally weighted; the pooled batch
/// means are merged in ascending stream_id order so the result does not depend on
/// completion order or on the order of `stream_ids`.
[[nodiscard]] CIEstimate estimate_invariant_functional(const SchemeConfig& cfg,
                                                       std::span<const std::uint64_t> stream_ids,
                                                       const EstimateOptions& opts = {});

/// R replicas on streams cfg.stream_id, ..., cfg.stream_id + R - 1.
[[nodiscard]] CIEstimate estimate_invariant_functional(const SchemeConfig& cfg, std::size_t replicas,
                                                       const EstimateOptions& opts = {});

/// One CSV row: functional,variant,tau,h_or_M,N,burn_in,replicas,mean,halfwidth,seed.
[[nodiscard]] std::string estimate_csv_header();
[[nodiscard]] std::string estimate_csv_row(const SchemeConfig& cfg, std::size_t replicas,
                                           const CIEstimate& est);

}  // namespace spde
