#pragma once

#include "spde/mesh.hpp"
#include "spde/scheme.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

/// Convergence-rate sweeps in tau and h with log-log slope fits.
namespace spde {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares of log y on log x. Needs at least two points with x, y > 0;
/// throws DegenerateFit when all x coincide.
[[nodiscard]] LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct SweepRow {
    double parameter = 0.0;
    double error = 0.0;
    double halfwidth = 0.0;  // 0 for exact rows
    bool used = true;        // passed the signal filter

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
    std::string parameter_name;  // "tau" or "h"
    std::vector<SweepRow> rows;  // ascending parameter
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct SweepOptions {
    /// Replicas per Monte Carlo point; the reference run uses four times as many.
    std::size_t replicas = 4;
    /// A Monte Carlo row enters the fit only if error > signal_factor * halfwidth.
    double signal_factor = 5.0;
    unsigned threads = 0;
};

/// Rows whose error is small against their halfwidth are marked unused; the fit uses
/// the rest. Throws InsufficientSignal below four usable rows.
void fit_sweep(SweepResult& result, double signal_factor = 5.0);

/// Weak error in tau at the base configuration's discretization.
///
/// Linear problems use exact oracle differences: for |.|^2 the exact second-moment gap,
/// for cos<., v> the gap between the time-discrete and the continuous-time
/// characteristic functionals. Anything else is estimated against a reference run at
/// tau_min/8 with four times the replicas, keeping the horizon steps*tau of the base
/// configuration fixed.
[[nodiscard]] SweepResult run_tau_sweep(const SchemeConfig& base, std::span<const double> taus,
                                        const SweepOptions& opts = {});

/// Weak error in h over the given meshes. Linear problems compare the continuous-time
/// FEM law to the continuous law exactly; otherwise a uniform reference mesh with a
/// quarter of the smallest h is simulated at the base tau.
[[nodiscard]] SweepResult run_h_sweep(const SchemeConfig& base, std::span<const Mesh> meshes,
                                      const SweepOptions& opts = {});

/// CSV text: header "<parameter>,error,halfwidth,used", one row per point and a final
/// "# slope=...,intercept=...,r2=..." comment line.
[[nodiscard]] std::string format_sweep_csv(const SweepResult& result);
[[nodiscard]] SweepResult parse_sweep_csv(const std::string& text);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

}  // namespace spde
