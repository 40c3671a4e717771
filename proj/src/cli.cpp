#include "spde/cli.hpp"

#include "spde/bench.hpp"
#include "spde/csv.hpp"
#include "spde/ergodic.hpp"
#include "spde/gaussian_oracle.hpp"
#include "spde/poisson_probe.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>

namespace spde {

namespace {

void emit(std::string_view name, const std::string& content, const RunOptions& opts, std::ostream& out)
{
    if (!opts.out_dir) {
        out << content;
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(*opts.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + opts.out_dir->string() + "': " + ec.message());
    }
    csv::write_file(*opts.out_dir / (std::string(name) + ".csv"), content);
}

std::string run_simulate(const ExperimentConfig& cfg)
{
    const Scheme scheme(cfg.scheme);
    const auto phi = scheme.bind(cfg.scheme.functional);
    std::string text = "step,time,phi\n";
    const auto row = [&](std::size_t m, std::span<const double> x) {
        text += csv::join({std::to_string(m), csv::format(static_cast<double>(m) * cfg.scheme.tau),
                           csv::format(phi(x))});
        text += '\n';
    };
    const auto final_state = simulate_raw(scheme, cfg.scheme, row);
    row(cfg.scheme.steps, final_state);
    return text;
}

std::string run_estimate(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto est = estimate_invariant_functional(cfg.scheme, cfg.replicas, EstimateOptions{opts.threads});
    return estimate_csv_header() + "\n" + estimate_csv_row(cfg.scheme, cfg.replicas, est) + "\n";
}

SweepOptions sweep_options(const ExperimentConfig& cfg, const RunOptions& opts)
{
    return {cfg.bench.replicas, cfg.bench.signal_factor, opts.threads};
}

std::vector<Mesh> oracle_meshes(const ExperimentConfig& cfg)
{
    std::vector<Mesh> meshes;
    if (cfg.oracle.uniform_n.empty()) {
        meshes.push_back(cfg.mesh.build());
    }
    for (auto n : cfg.oracle.uniform_n) {
        meshes.push_back(Mesh::uniform(n));
    }
    return meshes;
}

std::string run_oracle(const ExperimentConfig& cfg)
{
    using K = LinearInvariantLaw::Kind;
    const auto& spec = cfg.oracle;
    const auto taus = spec.taus.empty() ? std::vector<double>{cfg.scheme.tau} : spec.taus;
    const auto& phi = cfg.scheme.functional;
    if (spec.quantity == OracleSpec::Quantity::Functional && phi.kind != TestFunctional::Kind::SecondMomentH &&
        !(phi.kind == TestFunctional::Kind::CosInner && std::holds_alternative<SpectralField>(phi.direction))) {
        throw InvalidInput("oracle: the functional must be second_moment or cos_mode");
    }
    const auto evaluate = [&](const LinearInvariantLaw& law) -> SeriesValue {
        if (spec.quantity == OracleSpec::Quantity::SecondMoment || phi.kind == TestFunctional::Kind::SecondMomentH) {
            return second_moment_certified(law, spec.truncation);
        }
        return {char_functional(law, std::get<SpectralField>(phi.direction)), 0.0};
    };
    std::vector<OracleRow> rows;
    const auto add = [&](std::string label, double parameter, const LinearInvariantLaw& law) {
        const auto v = evaluate(law);
        rows.push_back({std::move(label), parameter, v.value, v.certified_error});
    };
    for (const auto kind : spec.laws) {
        switch (kind) {
        case K::Continuous:
            add("continuous", 0.0, LinearInvariantLaw::continuous());
            break;
        case K::DiscreteTimeSpectral:
            for (double t : taus) {
                add("discrete_time_spectral", t, LinearInvariantLaw::discrete_time_spectral(t));
            }
            break;
        case K::FemContinuousTime:
            for (const auto& m : oracle_meshes(cfg)) {
                add("fem_continuous_time", m.h(),
                    LinearInvariantLaw::fem_continuous_time(std::make_shared<const FemOperator>(m)));
            }
            break;
        case K::FemFullyDiscrete:
            for (const auto& m : oracle_meshes(cfg)) {
                const auto op = std::make_shared<const FemOperator>(m);
                for (double t : taus) {
                    add("fem_fully_discrete:h=" + csv::format(m.h()), t,
                        LinearInvariantLaw::fem_fully_discrete(op, t));
                }
            }
            break;
        }
    }
    return oracle_csv(rows);
}

std::string run_poisson(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto& p = cfg.poisson;
    auto sys = GalerkinSystem::make(p.M, cfg.scheme.nonlinearity, cfg.scheme.functional);
    PhibarBudget budget;
    budget.seed = cfg.scheme.seed;
    budget.threads = opts.threads;
    sys.phibar = estimate_phibar(sys, budget).value;
    PoissonOptions popts;
    popts.dt = p.dt;
    popts.substeps = p.substeps;
    popts.seed = cfg.scheme.seed;
    popts.threads = opts.threads;
    popts.check_tail = p.check_tail;
    std::string text = probe_csv_header() + "\n";
    for (const auto& x : p.points) {
        const auto r = poisson_residual(sys, x, p.delta, p.t_max, p.replicas, popts);
        text += probe_csv_row(sys, r, p.t_max, p.replicas, cfg.scheme.seed) + "\n";
    }
    return text;
}

std::string dispatch(std::string_view sub, const ExperimentConfig& cfg, const RunOptions& opts)
{
    if (sub == "simulate") {
        return run_simulate(cfg);
    }
    if (sub == "estimate") {
        return run_estimate(cfg, opts);
    }
    if (sub == "bench-tau") {
        return format_sweep_csv(run_tau_sweep(cfg.scheme, cfg.bench.taus, sweep_options(cfg, opts)));
    }
    if (sub == "bench-h") {
        std::vector<Mesh> meshes;
        for (auto n : cfg.bench.uniform_n) {
            meshes.push_back(Mesh::uniform(n));
        }
        return format_sweep_csv(run_h_sweep(cfg.scheme, meshes, sweep_options(cfg, opts)));
    }
    if (sub == "oracle") {
        return run_oracle(cfg);
    }
    if (sub == "poisson-check") {
        return run_poisson(cfg, opts);
    }
    throw InvalidInput("unknown subcommand '" + std::string(sub) + "'");
}

int report(std::ostream& err, std::string_view kind, const std::exception& e, int code)
{
    err << "error: " << kind << ": " << e.what() << '\n';
    return code;
}

}  // namespace

int run(std::string_view subcommand, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err)
{
    try {
        const auto content = dispatch(subcommand, cfg, opts);
        emit(subcommand == "bench-tau" ? "bench_tau"
             : subcommand == "bench-h" ? "bench_h"
             : subcommand == "poisson-check" ? "poisson_check"
                                             : subcommand,
             content, opts, out);
        return kExitOk;
    } catch (const InsufficientSignal& e) {
        return report(err, "InsufficientSignal", e, kExitNumerical);
    } catch (const TailNotConverged& e) {
        return report(err, "TailNotConverged", e, kExitNumerical);
    } catch (const NumericalFailure& e) {
        return report(err, "numerical failure", e, kExitNumerical);
    } catch (const InvalidInput& e) {
        return report(err, "invalid input", e, kExitInvalid);
    } catch (const IoError& e) {
        return report(err, "I/O", e, kExitInvalid);
    } catch (const std::exception& e) {
        return report(err, "internal", e, kExitNumerical);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Semi-implicit Euler schemes for the stochastic heat equation"};
    std::string subcommand;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    unsigned threads = 0;
    app.add_option("subcommand", subcommand, "simulate | estimate | bench-tau | bench-h | oracle | poisson-check")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(kSubcommands), std::end(kSubcommands))));
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--seed", seed, "overrides the configured seed");
    app.add_option("--out", out_dir, "output directory (default: CSV on standard output)");
    app.add_option("--threads", threads, "worker threads (default: available parallelism)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    ExperimentConfig cfg;
    try {
        cfg = parse_config(csv::read_file(config_path));
    } catch (const ConfigError& e) {
        return report(err, "configuration", e, kExitInvalid);
    } catch (const Error& e) {
        return report(err, "configuration", e, kExitInvalid);
    }
    if (seed) {
        cfg.scheme.seed = *seed;
    }
    RunOptions opts;
    if (out_dir) {
        opts.out_dir = *out_dir;
    }
    opts.threads = threads;
    return run(subcommand, cfg, opts, out, err);
}

}  // namespace spde
