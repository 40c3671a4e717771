#pragma once

#include "spde/error.hpp"
#include "spde/gaussian_oracle.hpp"
#include "spde/mesh.hpp"
#include "spde/poisson_probe.hpp"
#include "spde/scheme.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

/// JSON experiment configuration.
///
/// Top-level keys:
///   variant        "spectral" | "fem"                          (required)
///   tau            time step in (0, tau0]                      (required)
///   steps          horizon N                                   (required)
///   seed           unsigned integer                            (required)
///   M              spectral modes 0..M                         default 64
///   mesh           {"uniform_n": n} | {"nodes": [0, ..., 1]}   default {"uniform_n": 63}
///   tau0           upper bound on tau                          default 1
///   burn_in        discarded steps                             default steps / 10
///   replicas       replicas for estimates                      default 1
///   initial        eigen-coefficients of x                     default 0
///   nonlinearity   null | {"kind": "zero" | "sine" | "constant", ...}
///   functional     {"kind": "cos_mode" | "exp_neg_sq" | "second_moment" | "constant", ...}
///   bench          {"taus", "uniform_n", "replicas", "signal_factor"}
///   oracle         {"laws", "taus", "uniform_n", "quantity", "truncation"}
///   poisson        {"M", "points", "delta", "T_max", "replicas", "dt", "substeps", "check_tail"}
namespace spde {

struct ConfigIssue {
    enum class Kind { SchemaViolation, ValueOutOfRange };
    Kind kind = Kind::SchemaViolation;
    std::string path;
    std::string reason;

    [[nodiscard]] std::string describe() const;
};

/// Every problem found in a configuration, not just the first.
class ConfigError : public InvalidInput {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    [[nodiscard]] const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct MeshSpec {
    std::optional<std::size_t> uniform_n;
    std::vector<double> nodes;

    [[nodiscard]] Mesh build() const;
};

struct BenchSpec {
    std::vector<double> taus;
    std::vector<std::size_t> uniform_n;
    std::size_t replicas = 4;
    double signal_factor = 5.0;
};

struct OracleSpec {
    enum class Quantity { SecondMoment, Functional };
    std::vector<LinearInvariantLaw::Kind> laws{LinearInvariantLaw::Kind::Continuous};
    std::vector<double> taus;             // empty: use the top-level tau
    std::vector<std::size_t> uniform_n;   // empty: use the top-level mesh
    Quantity quantity = Quantity::SecondMoment;
    std::size_t truncation = kDefaultTruncation;
};

struct PoissonSpec {
    std::size_t M = 0;
    std::vector<Point> points{{-1.0}, {0.0}, {1.0}};
    double delta = 0.05;
    double t_max = 2.0;
    std::size_t replicas = 100000;
    double dt = 0.01;
    std::size_t substeps = 10;
    bool check_tail = true;
};

struct ExperimentConfig {
    SchemeConfig scheme;
    std::size_t M = 64;
    MeshSpec mesh;
    std::size_t replicas = 1;
    BenchSpec bench;
    OracleSpec oracle;
    PoissonSpec poisson;
};

/// Validates and fills defaults. Throws ConfigError listing every issue found.
[[nodiscard]] ExperimentConfig parse_config(std::string_view json_text);

}  // namespace spde
