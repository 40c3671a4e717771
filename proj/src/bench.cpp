#include "spde/bench.hpp"

#include "spde/csv.hpp"
#include "spde/ergodic.hpp"
#include "spde/error.hpp"
#include "spde/gaussian_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spde {

namespace {

using Kind = TestFunctional::Kind;

bool has_exact_oracle(const SchemeConfig& cfg)
{
    return !cfg.nonlinearity &&
           (cfg.functional.kind == Kind::SecondMomentH || cfg.functional.kind == Kind::CosInner);
}

double law_value(const LinearInvariantLaw& law, const TestFunctional& phi)
{
    if (phi.kind == Kind::SecondMomentH) {
        return second_moment(law);
    }
    if (const auto* v = std::get_if<SpectralField>(&phi.direction)) {
        return char_functional(law, *v);
    }
    if (const auto* v = std::get_if<NodalField>(&phi.direction)) {
        return char_functional(law, *v);
    }
    throw InvalidInput("cos_inner functional has no direction");
}

std::vector<double> sorted_unique(std::span<const double> values, const char* what)
{
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
        throw InvalidInput(std::string("sweep: repeated ") + what + " value");
    }
    return v;
}

SchemeConfig at_tau(const SchemeConfig& base, double tau, double horizon, double burn_fraction)
{
    SchemeConfig cfg = base;
    cfg.tau = tau;
    cfg.tau0 = std::max(base.tau0, tau);
    cfg.steps = static_cast<std::size_t>(std::llround(horizon / tau));
    cfg.burn_in = static_cast<std::size_t>(std::llround(burn_fraction * static_cast<double>(cfg.steps)));
    return cfg;
}

SweepRow mc_row(double parameter, const CIEstimate& est, const CIEstimate& ref)
{
    return {parameter, std::abs(est.mean - ref.mean), std::hypot(est.halfwidth, ref.halfwidth), true};
}

}  // namespace

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw InvalidInput("fit_loglog: x and y differ in length");
    }
    if (x.size() < 2) {
        throw DegenerateFit("fit_loglog: need at least two points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw InvalidInput("fit_loglog: points must be positive");
        }
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        const double dy = std::log(y[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw DegenerateFit("fit_loglog: all x values are equal");
    }
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

void fit_sweep(SweepResult& result, double signal_factor)
{
    std::vector<double> x;
    std::vector<double> y;
    for (auto& r : result.rows) {
        r.used = r.error > 0.0 && r.error > signal_factor * r.halfwidth;
        if (r.used) {
            x.push_back(r.parameter);
            y.push_back(r.error);
        }
    }
    if (x.size() < 4) {
        throw InsufficientSignal("sweep: " + std::to_string(x.size()) + " of " +
                                 std::to_string(result.rows.size()) +
                                 " points carry signal, at least 4 are needed for a slope");
    }
    const auto fit = fit_loglog(x, y);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.r2 = fit.r2;
}

SweepResult run_tau_sweep(const SchemeConfig& base, std::span<const double> taus, const SweepOptions& opts)
{
    SweepResult result;
    result.parameter_name = "tau";
    const auto ts = sorted_unique(taus, "tau");
    for (double t : ts) {
        if (!(t > 0.0)) {
            throw InvalidInput("run_tau_sweep: tau must be positive");
        }
    }
    if (ts.empty()) {
        fit_sweep(result, opts.signal_factor);
    }
    if (has_exact_oracle(base)) {
        const bool spectral = base.is_spectral();
        const auto op = spectral ? nullptr : std::get<FemVariant>(base.variant).op;
        const auto limit = spectral ? LinearInvariantLaw::continuous() : LinearInvariantLaw::fem_continuous_time(op);
        const double limit_value = law_value(limit, base.functional);
        for (double t : ts) {
            double err = 0.0;
            if (spectral && base.functional.kind == Kind::SecondMomentH) {
                err = tau_weak_error_exact(t);
            } else {
                const auto law = spectral ? LinearInvariantLaw::discrete_time_spectral(t)
                                          : LinearInvariantLaw::fem_fully_discrete(op, t);
                err = std::abs(law_value(law, base.functional) - limit_value);
            }
            result.rows.push_back({t, err, 0.0, true});
        }
        fit_sweep(result, opts.signal_factor);
        return result;
    }

    if (base.steps == 0) {
        throw InvalidInput("run_tau_sweep: base configuration needs steps > 0 to fix the horizon");
    }
    const double horizon = base.tau * static_cast<double>(base.steps);
    const double burn_fraction = static_cast<double>(base.burn_in) / static_cast<double>(base.steps);
    const EstimateOptions eopts{opts.threads};
    const auto ref_cfg = at_tau(base, ts.front() / 8.0, horizon, burn_fraction);
    const auto ref = estimate_invariant_functional(ref_cfg, 4 * opts.replicas, eopts);
    for (double t : ts) {
        const auto est = estimate_invariant_functional(at_tau(base, t, horizon, burn_fraction), opts.replicas, eopts);
        result.rows.push_back(mc_row(t, est, ref));
    }
    fit_sweep(result, opts.signal_factor);
    return result;
}

SweepResult run_h_sweep(const SchemeConfig& base, std::span<const Mesh> meshes, const SweepOptions& opts)
{
    SweepResult result;
    result.parameter_name = "h";
    std::vector<const Mesh*> order;
    for (const auto& m : meshes) {
        order.push_back(&m);
    }
    std::sort(order.begin(), order.end(), [](const Mesh* a, const Mesh* b) { return a->h() < b->h(); });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->h() == order[i - 1]->h()) {
            throw InvalidInput("run_h_sweep: two meshes share the same h");
        }
    }
    if (order.empty()) {
        fit_sweep(result, opts.signal_factor);
    }
    if (has_exact_oracle(base)) {
        if (base.functional.kind == Kind::CosInner &&
            !std::holds_alternative<SpectralField>(base.functional.direction)) {
            throw InvalidInput("run_h_sweep: cos_inner directions must be spectral to compare meshes");
        }
        const double limit_value = law_value(LinearInvariantLaw::continuous(), base.functional);
        for (const Mesh* m : order) {
            const auto op = std::make_shared<const FemOperator>(*m);
            double err = 0.0;
            if (base.functional.kind == Kind::SecondMomentH) {
                err = h_weak_error_exact(*op);
            } else {
                err = std::abs(law_value(LinearInvariantLaw::fem_continuous_time(op), base.functional) - limit_value);
            }
            result.rows.push_back({m->h(), err, 0.0, true});
        }
        fit_sweep(result, opts.signal_factor);
        return result;
    }

    const EstimateOptions eopts{opts.threads};
    SchemeConfig ref_cfg = base;
    const auto ref_intervals = static_cast<std::size_t>(std::ceil(4.0 / order.front()->h()));
    ref_cfg.variant = fem_variant(Mesh::uniform(ref_intervals - 1));
    const auto ref = estimate_invariant_functional(ref_cfg, 4 * opts.replicas, eopts);
    for (const Mesh* m : order) {
        SchemeConfig cfg = base;
        cfg.variant = fem_variant(*m);
        result.rows.push_back(mc_row(m->h(), estimate_invariant_functional(cfg, opts.replicas, eopts), ref));
    }
    fit_sweep(result, opts.signal_factor);
    return result;
}

std::string format_sweep_csv(const SweepResult& result)
{
    std::string out = result.parameter_name + ",error,halfwidth,used\n";
    for (const auto& r : result.rows) {
        out += csv::join({csv::format(r.parameter), csv::format(r.error), csv::format(r.halfwidth),
                          r.used ? "1" : "0"});
        out += '\n';
    }
    out += "# slope=" + csv::format(result.slope) + ",intercept=" + csv::format(result.intercept) +
           ",r2=" + csv::format(result.r2) + '\n';
    return out;
}

SweepResult parse_sweep_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    SweepResult result;
    if (!std::getline(in, line)) {
        throw InvalidInput("sweep csv: empty input");
    }
    const auto header = csv::split(line);
    if (header.size() != 4 || header[1] != "error" || header[2] != "halfwidth" || header[3] != "used") {
        throw InvalidInput("sweep csv: unexpected header '" + line + "'");
    }
    result.parameter_name = header[0];
    bool have_fit = false;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            for (const auto& field : csv::split(std::string_view(line).substr(2))) {
                const auto eq = field.find('=');
                if (eq == std::string::npos) {
                    throw InvalidInput("sweep csv: malformed fit field '" + field + "'");
                }
                const auto key = field.substr(0, eq);
                const double value = csv::parse_double(std::string_view(field).substr(eq + 1));
                if (key == "slope") {
                    result.slope = value;
                } else if (key == "intercept") {
                    result.intercept = value;
                } else if (key == "r2") {
                    result.r2 = value;
                } else {
                    throw InvalidInput("sweep csv: unknown fit field '" + key + "'");
                }
            }
            have_fit = true;
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() != 4) {
            throw InvalidInput("sweep csv: expected 4 fields in '" + line + "'");
        }
        result.rows.push_back({csv::parse_double(f[0]), csv::parse_double(f[1]), csv::parse_double(f[2]),
                               f[3] == "1"});
    }
    if (!have_fit) {
        throw InvalidInput("sweep csv: missing '# slope=' line");
    }
    return result;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path)
{
    csv::write_file(path, format_sweep_csv(result));
}

}  // namespace spde
