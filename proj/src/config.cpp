#include "spde/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace spde {

namespace {

using json = nlohmann::json;
using IssueKind = ConfigIssue::Kind;

std::string child(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

class Reader {
public:
    std::vector<ConfigIssue> issues;

    void schema(std::string path, std::string reason)
    {
        issues.push_back({IssueKind::SchemaViolation, std::move(path), std::move(reason)});
    }
    void range(std::string path, std::string reason)
    {
        issues.push_back({IssueKind::ValueOutOfRange, std::move(path), std::move(reason)});
    }

    /// Checks that j is an object and reports keys outside `allowed`.
    bool object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
    {
        if (!j.is_object()) {
            schema(path.empty() ? "<root>" : path, "expected an object");
            return false;
        }
        for (const auto& [key, value] : j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                schema(child(path, key), "unknown key '" + key + "'");
            }
        }
        return true;
    }

    static const json* find(const json& j, std::string_view key)
    {
        const auto it = j.find(key);
        return it == j.end() || it->is_null() ? nullptr : &*it;
    }

    std::optional<double> number(const json& j, std::string_view key, const std::string& path, bool required = false)
    {
        const json* v = find(j, key);
        if (!v) {
            if (required) {
                schema(child(path, key), "required number is missing");
            }
            return std::nullopt;
        }
        return as_number(*v, child(path, key));
    }

    std::optional<double> as_number(const json& v, const std::string& path)
    {
        if (!v.is_number()) {
            schema(path, "expected a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            range(path, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<std::uint64_t> as_count(const json& v, const std::string& path)
    {
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        if (v.is_number_integer()) {
            range(path, "must be nonnegative");
            return std::nullopt;
        }
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (x >= 0.0 && x < 1.8e19 && std::floor(x) == x) {
                return static_cast<std::uint64_t>(x);
            }
            range(path, "must be a nonnegative integer");
            return std::nullopt;
        }
        schema(path, "expected an integer");
        return std::nullopt;
    }

    std::optional<std::uint64_t> count(const json& j, std::string_view key, const std::string& path,
                                       bool required = false)
    {
        const json* v = find(j, key);
        if (!v) {
            if (required) {
                schema(child(path, key), "required integer is missing");
            }
            return std::nullopt;
        }
        return as_count(*v, child(path, key));
    }

    std::optional<std::string> string(const json& j, std::string_view key, const std::string& path,
                                      bool required = false)
    {
        const json* v = find(j, key);
        if (!v) {
            if (required) {
                schema(child(path, key), "required string is missing");
            }
            return std::nullopt;
        }
        if (!v->is_string()) {
            schema(child(path, key), "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<bool> boolean(const json& j, std::string_view key, const std::string& path)
    {
        const json* v = find(j, key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_boolean()) {
            schema(child(path, key), "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<std::vector<double>> numbers(const json& j, std::string_view key, const std::string& path)
    {
        const json* v = find(j, key);
        if (!v) {
            return std::nullopt;
        }
        return as_numbers(*v, child(path, key));
    }

    std::optional<std::vector<double>> as_numbers(const json& v, const std::string& path)
    {
        if (!v.is_array()) {
            schema(path, "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        bool ok = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto x = as_number(v[i], index(path, i));
            ok = ok && x.has_value();
            out.push_back(x.value_or(0.0));
        }
        return ok ? std::optional(out) : std::nullopt;
    }

    std::optional<std::vector<std::uint64_t>> counts(const json& j, std::string_view key, const std::string& path)
    {
        const json* v = find(j, key);
        if (!v) {
            return std::nullopt;
        }
        const auto p = child(path, key);
        if (!v->is_array()) {
            schema(p, "expected an array of integers");
            return std::nullopt;
        }
        std::vector<std::uint64_t> out;
        bool ok = true;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto x = as_count((*v)[i], index(p, i));
            ok = ok && x.has_value();
            out.push_back(x.value_or(0));
        }
        return ok ? std::optional(out) : std::nullopt;
    }
};

std::optional<Nonlinearity> read_nonlinearity(Reader& r, const json& root)
{
    const json* j = Reader::find(root, "nonlinearity");
    if (!j) {
        return std::nullopt;
    }
    const std::string path = "nonlinearity";
    if (!r.object(*j, path, {"kind", "scale", "lipschitz", "value"})) {
        return std::nullopt;
    }
    const auto kind = r.string(*j, "kind", path, true);
    if (!kind) {
        return std::nullopt;
    }
    if (*kind == "zero") {
        return Nonlinearity::zero();
    }
    if (*kind == "sine") {
        const double scale = r.number(*j, "scale", path).value_or(1.0);
        const double lip = r.number(*j, "lipschitz", path).value_or(1.0);
        if (!(scale > 0.0)) {
            r.range(child(path, "scale"), "must be positive");
            return std::nullopt;
        }
        if (!(lip >= 0.0)) {
            r.range(child(path, "lipschitz"), "must be nonnegative");
            return std::nullopt;
        }
        return Nonlinearity::sine(scale, lip);
    }
    if (*kind == "constant") {
        return Nonlinearity::constant(r.number(*j, "value", path, true).value_or(0.0));
    }
    r.schema(child(path, "kind"), "unknown nonlinearity '" + *kind + "' (zero, sine, constant)");
    return std::nullopt;
}

std::optional<TestFunctional> read_functional(Reader& r, const json& root)
{
    const json* j = Reader::find(root, "functional");
    if (!j) {
        return TestFunctional::cos_mode(0);
    }
    const std::string path = "functional";
    if (!r.object(*j, path, {"kind", "mode", "scale", "value"})) {
        return std::nullopt;
    }
    const auto kind = r.string(*j, "kind", path, true);
    if (!kind) {
        return std::nullopt;
    }
    if (*kind == "cos_mode") {
        const auto mode = r.count(*j, "mode", path).value_or(0);
        return TestFunctional::cos_mode(static_cast<std::size_t>(mode));
    }
    if (*kind == "exp_neg_sq") {
        const double s = r.number(*j, "scale", path).value_or(1.0);
        if (!(s > 0.0)) {
            r.range(child(path, "scale"), "must be positive");
            return std::nullopt;
        }
        return TestFunctional::exp_neg_sq(s);
    }
    if (*kind == "second_moment") {
        return TestFunctional::second_moment();
    }
    if (*kind == "constant") {
        return TestFunctional::constant(r.number(*j, "value", path, true).value_or(0.0));
    }
    r.schema(child(path, "kind"), "unknown functional '" + *kind + "' (cos_mode, exp_neg_sq, second_moment, constant)");
    return std::nullopt;
}

void read_mesh(Reader& r, const json& root, MeshSpec& spec)
{
    const json* j = Reader::find(root, "mesh");
    if (!j) {
        spec.uniform_n = 63;
        return;
    }
    const std::string path = "mesh";
    if (!r.object(*j, path, {"uniform_n", "nodes"})) {
        return;
    }
    if ((Reader::find(*j, "uniform_n") != nullptr) == (Reader::find(*j, "nodes") != nullptr)) {
        r.schema(path, "give exactly one of uniform_n and nodes");
        return;
    }
    const auto n = r.count(*j, "uniform_n", path);
    const auto nodes = r.numbers(*j, "nodes", path);
    if (!n && !nodes) {
        return;
    }
    if (n) {
        if (*n < 1) {
            r.range(child(path, "uniform_n"), "needs at least one interior node");
            return;
        }
        spec.uniform_n = static_cast<std::size_t>(*n);
        return;
    }
    spec.nodes = *nodes;
    try {
        (void)spec.build();
    } catch (const InvalidInput& e) {
        r.range(child(path, "nodes"), e.what());
    }
}

std::optional<LinearInvariantLaw::Kind> law_kind(std::string_view name)
{
    using K = LinearInvariantLaw::Kind;
    if (name == "continuous") {
        return K::Continuous;
    }
    if (name == "discrete_time_spectral") {
        return K::DiscreteTimeSpectral;
    }
    if (name == "fem_continuous_time") {
        return K::FemContinuousTime;
    }
    if (name == "fem_fully_discrete") {
        return K::FemFullyDiscrete;
    }
    return std::nullopt;
}

void read_bench(Reader& r, const json& root, BenchSpec& spec)
{
    const json* j = Reader::find(root, "bench");
    if (!j) {
        return;
    }
    const std::string path = "bench";
    if (!r.object(*j, path, {"taus", "uniform_n", "replicas", "signal_factor"})) {
        return;
    }
    if (auto taus = r.numbers(*j, "taus", path)) {
        for (std::size_t i = 0; i < taus->size(); ++i) {
            if (!((*taus)[i] > 0.0)) {
                r.range(index(child(path, "taus"), i), "tau must be positive");
            }
        }
        spec.taus = *taus;
    }
    if (auto ns = r.counts(*j, "uniform_n", path)) {
        for (std::size_t i = 0; i < ns->size(); ++i) {
            if ((*ns)[i] < 1) {
                r.range(index(child(path, "uniform_n"), i), "needs at least one interior node");
            }
            spec.uniform_n.push_back(static_cast<std::size_t>((*ns)[i]));
        }
    }
    if (auto rep = r.count(*j, "replicas", path)) {
        if (*rep < 1) {
            r.range(child(path, "replicas"), "must be at least 1");
        }
        spec.replicas = static_cast<std::size_t>(*rep);
    }
    if (auto s = r.number(*j, "signal_factor", path)) {
        if (!(*s >= 0.0)) {
            r.range(child(path, "signal_factor"), "must be nonnegative");
        }
        spec.signal_factor = *s;
    }
}

void read_oracle(Reader& r, const json& root, OracleSpec& spec)
{
    const json* j = Reader::find(root, "oracle");
    if (!j) {
        return;
    }
    const std::string path = "oracle";
    if (!r.object(*j, path, {"laws", "taus", "uniform_n", "quantity", "truncation"})) {
        return;
    }
    if (const json* laws = Reader::find(*j, "laws")) {
        const auto p = child(path, "laws");
        if (!laws->is_array()) {
            r.schema(p, "expected an array of law names");
        } else {
            spec.laws.clear();
            for (std::size_t i = 0; i < laws->size(); ++i) {
                const auto& l = (*laws)[i];
                const auto k = l.is_string() ? law_kind(l.get<std::string>()) : std::nullopt;
                if (!k) {
                    r.schema(index(p, i),
                             "expected continuous, discrete_time_spectral, fem_continuous_time or fem_fully_discrete");
                } else {
                    spec.laws.push_back(*k);
                }
            }
        }
    }
    if (auto taus = r.numbers(*j, "taus", path)) {
        for (std::size_t i = 0; i < taus->size(); ++i) {
            if (!((*taus)[i] > 0.0)) {
                r.range(index(child(path, "taus"), i), "tau must be positive");
            }
        }
        spec.taus = *taus;
    }
    if (auto ns = r.counts(*j, "uniform_n", path)) {
        for (std::size_t i = 0; i < ns->size(); ++i) {
            if ((*ns)[i] < 1) {
                r.range(index(child(path, "uniform_n"), i), "needs at least one interior node");
            }
            spec.uniform_n.push_back(static_cast<std::size_t>((*ns)[i]));
        }
    }
    if (auto q = r.string(*j, "quantity", path)) {
        if (*q == "second_moment") {
            spec.quantity = OracleSpec::Quantity::SecondMoment;
        } else if (*q == "functional") {
            spec.quantity = OracleSpec::Quantity::Functional;
        } else {
            r.schema(child(path, "quantity"), "expected second_moment or functional");
        }
    }
    if (auto t = r.count(*j, "truncation", path)) {
        if (*t < 1) {
            r.range(child(path, "truncation"), "must be at least 1");
        }
        spec.truncation = static_cast<std::size_t>(*t);
    }
}

void read_poisson(Reader& r, const json& root, PoissonSpec& spec)
{
    const json* j = Reader::find(root, "poisson");
    if (!j) {
        return;
    }
    const std::string path = "poisson";
    if (!r.object(*j, path, {"M", "points", "delta", "T_max", "replicas", "dt", "substeps", "check_tail"})) {
        return;
    }
    if (auto m = r.count(*j, "M", path)) {
        if (*m + 1 > GalerkinSystem::kMaxModes) {
            r.range(child(path, "M"), "at most " + std::to_string(GalerkinSystem::kMaxModes - 1));
        }
        spec.M = static_cast<std::size_t>(*m);
    }
    if (const json* pts = Reader::find(*j, "points")) {
        const auto p = child(path, "points");
        if (!pts->is_array()) {
            r.schema(p, "expected an array of points");
        } else {
            spec.points.clear();
            for (std::size_t i = 0; i < pts->size(); ++i) {
                if (auto x = r.as_numbers((*pts)[i], index(p, i))) {
                    spec.points.push_back(*x);
                }
            }
        }
    } else {
        for (auto& x : spec.points) {
            x.assign(spec.M + 1, 0.0);
        }
        spec.points[0][0] = -1.0;
        spec.points[2][0] = 1.0;
    }
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        if (spec.points[i].size() != spec.M + 1) {
            r.range(index(child(path, "points"), i), "point must have M+1 coordinates");
        }
    }
    const auto positive = [&](std::string_view key, double& target) {
        if (auto v = r.number(*j, key, path)) {
            if (!(*v > 0.0)) {
                r.range(child(path, key), "must be positive");
            }
            target = *v;
        }
    };
    positive("delta", spec.delta);
    positive("T_max", spec.t_max);
    positive("dt", spec.dt);
    if (auto rep = r.count(*j, "replicas", path)) {
        if (*rep < 2) {
            r.range(child(path, "replicas"), "must be at least 2");
        }
        spec.replicas = static_cast<std::size_t>(*rep);
    }
    if (auto s = r.count(*j, "substeps", path)) {
        if (*s < 1) {
            r.range(child(path, "substeps"), "must be at least 1");
        }
        spec.substeps = static_cast<std::size_t>(*s);
    }
    if (auto b = r.boolean(*j, "check_tail", path)) {
        spec.check_tail = *b;
    }
}

}  // namespace

std::string ConfigIssue::describe() const
{
    return std::string(kind == Kind::SchemaViolation ? "SchemaViolation" : "ValueOutOfRange") + " at '" + path +
           "': " + reason;
}

namespace {

std::string summarize(const std::vector<ConfigIssue>& issues)
{
    std::string msg = "invalid configuration (" + std::to_string(issues.size()) + " issue" +
                      (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& i : issues) {
        msg += "\n  " + i.describe();
    }
    return msg;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues) : InvalidInput(summarize(issues)), issues_(std::move(issues))
{}

Mesh MeshSpec::build() const
{
    if (uniform_n) {
        return Mesh::uniform(*uniform_n);
    }
    return Mesh::from_nodes(nodes);
}

ExperimentConfig parse_config(std::string_view json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({{IssueKind::SchemaViolation, "<root>", std::string("malformed JSON: ") + e.what()}});
    }
    Reader r;
    ExperimentConfig cfg;
    const std::string top;
    if (!r.object(root, top, {"variant", "tau", "steps", "seed", "M", "mesh", "tau0", "burn_in", "replicas", "initial",
                              "nonlinearity", "functional", "bench", "oracle", "poisson"})) {
        throw ConfigError(std::move(r.issues));
    }

    const auto variant = r.string(root, "variant", top, true);
    if (variant && *variant != "spectral" && *variant != "fem") {
        r.range("variant", "expected spectral or fem");
    }
    const auto tau0 = r.number(root, "tau0", top).value_or(1.0);
    if (!(tau0 > 0.0)) {
        r.range("tau0", "must be positive");
    }
    const auto tau = r.number(root, "tau", top, true);
    if (tau && !(*tau > 0.0 && *tau <= tau0)) {
        r.range("tau", "must lie in (0, tau0]");
    }
    const auto steps = r.count(root, "steps", top, true);
    if (steps && *steps < 1) {
        r.range("steps", "must be at least 1");
    }
    const auto seed = r.count(root, "seed", top, true);
    const auto burn_in = r.count(root, "burn_in", top);
    if (burn_in && steps && *burn_in >= *steps) {
        r.range("burn_in", "must be smaller than steps");
    }
    if (auto rep = r.count(root, "replicas", top)) {
        if (*rep < 1) {
            r.range("replicas", "must be at least 1");
        }
        cfg.replicas = static_cast<std::size_t>(*rep);
    }
    if (auto m = r.count(root, "M", top)) {
        cfg.M = static_cast<std::size_t>(*m);
    }
    read_mesh(r, root, cfg.mesh);
    const auto initial = r.numbers(root, "initial", top);
    auto nl = read_nonlinearity(r, root);
    auto phi = read_functional(r, root);
    read_bench(r, root, cfg.bench);
    read_oracle(r, root, cfg.oracle);
    read_poisson(r, root, cfg.poisson);

    if (!r.issues.empty()) {
        throw ConfigError(std::move(r.issues));
    }

    auto& s = cfg.scheme;
    if (*variant == "spectral") {
        s.variant = SpectralVariant{cfg.M};
    } else {
        s.variant = fem_variant(cfg.mesh.build());
    }
    s.tau = *tau;
    s.tau0 = tau0;
    s.steps = static_cast<std::size_t>(*steps);
    s.burn_in = burn_in ? static_cast<std::size_t>(*burn_in) : default_burn_in(s.steps);
    s.seed = *seed;
    s.nonlinearity = std::move(nl);
    s.functional = std::move(*phi);
    if (initial) {
        s.initial = SpectralField(*initial);
    }
    s.validate();
    return cfg;
}

}  // namespace spde
