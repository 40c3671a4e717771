#include "spde/scheme.hpp"

#include "spde/error.hpp"

#include <cmath>
#include <numeric>

namespace spde {

FemVariant fem_variant(const Mesh& mesh)
{
    return FemVariant{std::make_shared<const FemOperator>(mesh)};
}

void SchemeConfig::validate() const
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidInput("tau must be positive");
    }
    if (tau > tau0) {
        throw InvalidInput("tau exceeds the configured cap tau0");
    }
    if (steps > 0 && burn_in >= steps) {
        throw InvalidInput("burn_in must be smaller than steps");
    }
    if (const auto* fem = std::get_if<FemVariant>(&variant); fem && !fem->op) {
        throw InvalidInput("finite element variant without an assembled operator");
    }
    if (!initial.is_finite()) {
        throw InvalidInput("initial condition must be finite");
    }
    if (functional.kind == TestFunctional::Kind::Custom && !functional.custom) {
        throw InvalidInput("custom functional without a callable");
    }
}

std::string SchemeConfig::variant_name() const
{
    return is_spectral() ? "spectral" : "fem";
}

double SchemeConfig::resolution() const
{
    if (const auto* s = std::get_if<SpectralVariant>(&variant)) {
        return static_cast<double>(s->M);
    }
    return std::get<FemVariant>(variant).op->mesh().h();
}

SpectralField sample_noise_spectral(std::size_t M, double tau, NoiseSource& src)
{
    if (!(tau > 0.0)) {
        throw InvalidInput("sample_noise_spectral: tau must be positive");
    }
    SpectralField xi(M + 1);
    src.next_normals(xi.coeffs());
    return xi;
}

std::vector<double> sample_noise_fem(const FemOperator& op, double tau, NoiseSource& src)
{
    if (!(tau > 0.0)) {
        throw InvalidInput("sample_noise_fem: tau must be positive");
    }
    std::vector<double> xi(op.size());
    src.next_normals(xi);
    std::vector<double> z(op.size());
    op.mass_cholesky().multiply(xi, z);
    const double s = std::sqrt(tau);
    for (double& v : z) {
        v *= s;
    }
    return z;
}

// ---------------------------------------------------------------------------
// Spectral Galerkin

SpectralScheme::SpectralScheme(std::size_t M, double tau, std::optional<Nonlinearity> nl)
    : tau_(tau), nl_(std::move(nl))
{
    const std::size_t modes = M + 1;
    lambda_.resize(modes);
    resolvent_.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        lambda_[k] = eigenvalue(k);
        resolvent_[k] = 1.0 / (1.0 + tau * lambda_[k]);
    }
    if (!nl_) {
        return;
    }
    const std::size_t Q = 2 * modes;
    const double dx = 1.0 / static_cast<double>(Q + 1);
    synth_.resize(static_cast<Eigen::Index>(Q), static_cast<Eigen::Index>(modes));
    grid_xi_.resize(Q);
    for (std::size_t q = 0; q < Q; ++q) {
        grid_xi_[q] = static_cast<double>(q + 1) * dx;
        for (std::size_t k = 0; k < modes; ++k) {
            synth_(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k)) =
                eigenfunction(k, grid_xi_[q]);
        }
    }
    // Trapezoid error -(dx^2/12)(f'(1) - f'(0)) for f = g e_k, where f'(0) = g(0,0) sqrt2 m pi
    // and f'(1) = g(1,0) sqrt2 m pi cos(m pi) since x vanishes at both ends.
    endpoint_weight_left_.resize(modes);
    endpoint_weight_right_.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        const double m = static_cast<double>(k + 1);
        const double c = dx * dx / 12.0 * std::sqrt(2.0) * m * kPi;
        endpoint_weight_left_[k] = c;
        endpoint_weight_right_[k] = -c * ((k % 2 == 0) ? -1.0 : 1.0);
    }
}

SpectralScheme::Workspace SpectralScheme::make_workspace() const
{
    return Workspace{Eigen::VectorXd(synth_.rows()), Eigen::VectorXd(synth_.cols())};
}

void SpectralScheme::nemytskii(std::span<const double> x, std::span<double> out, Workspace& ws) const
{
    if (!nl_) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const auto modes = static_cast<Eigen::Index>(dimension());
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), modes);
    ws.grid.noalias() = synth_ * xv;
    for (Eigen::Index q = 0; q < ws.grid.size(); ++q) {
        ws.grid(q) = nl_->g(grid_xi_[static_cast<std::size_t>(q)], ws.grid(q));
    }
    const double dx = 1.0 / static_cast<double>(synth_.rows() + 1);
    Eigen::Map<Eigen::VectorXd> ov(out.data(), modes);
    ov.noalias() = dx * (synth_.transpose() * ws.grid);
    const double g0 = nl_->g(0.0, 0.0);
    const double g1 = nl_->g(1.0, 0.0);
    if (g0 != 0.0 || g1 != 0.0) {
        for (std::size_t k = 0; k < dimension(); ++k) {
            out[k] += endpoint_weight_left_[k] * g0 + endpoint_weight_right_[k] * g1;
        }
    }
}

Eigen::MatrixXd SpectralScheme::nemytskii_jacobian(std::span<const double> x, Workspace& ws) const
{
    const auto modes = static_cast<Eigen::Index>(dimension());
    if (!nl_) {
        return Eigen::MatrixXd::Zero(modes, modes);
    }
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), modes);
    ws.grid.noalias() = synth_ * xv;
    for (Eigen::Index q = 0; q < ws.grid.size(); ++q) {
        ws.grid(q) = nl_->dg_du(grid_xi_[static_cast<std::size_t>(q)], ws.grid(q));
    }
    const double dx = 1.0 / static_cast<double>(synth_.rows() + 1);
    return dx * (synth_.transpose() * ws.grid.asDiagonal() * synth_);
}

void SpectralScheme::step(std::span<double> x, std::span<const double> normals, Workspace& ws) const
{
    const double sq = std::sqrt(tau_);
    if (nl_) {
        std::span<double> drift(ws.drift.data(), dimension());
        nemytskii(x, drift, ws);
        for (std::size_t k = 0; k < dimension(); ++k) {
            x[k] = (x[k] + tau_ * drift[k] + sq * normals[k]) * resolvent_[k];
        }
    } else {
        for (std::size_t k = 0; k < dimension(); ++k) {
            x[k] = (x[k] + sq * normals[k]) * resolvent_[k];
        }
    }
}

SpectralField nemytskii_project_spectral(std::size_t M, const Nonlinearity& nl, const SpectralField& x)
{
    if (x.mode_count() != M + 1) {
        throw InvalidInput("nemytskii_project_spectral: field must have M+1 modes");
    }
    SpectralScheme scheme(M, 1.0, nl);
    auto ws = scheme.make_workspace();
    SpectralField out(M + 1);
    scheme.nemytskii(x.coeffs(), out.coeffs(), ws);
    return out;
}

// ---------------------------------------------------------------------------
// Finite elements

namespace {

void fem_nemytskii_load(const Mesh& mesh, const Nonlinearity& nl, std::span<const double> x,
                        std::span<double> b)
{
    constexpr double kNode = 0.21132486540518711775;  // (1 - 1/sqrt3)/2
    const std::size_t n = mesh.interior_count();
    const auto nodes = mesh.nodes();
    std::fill(b.begin(), b.end(), 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double a = nodes[e];
        const double g = nodes[e + 1] - a;
        const double va = (e == 0) ? 0.0 : x[e - 1];
        const double vb = (e == n) ? 0.0 : x[e];
        double to_left = 0.0;
        double to_right = 0.0;
        for (double t : {kNode, 1.0 - kNode}) {
            const double u = (1.0 - t) * va + t * vb;
            const double w = 0.5 * g * nl.g(a + t * g, u);
            to_left += w * (1.0 - t);
            to_right += w * t;
        }
        if (e >= 1) {
            b[e - 1] += to_left;
        }
        if (e < n) {
            b[e] += to_right;
        }
    }
}

}  // namespace

std::vector<double> nemytskii_load_fem(const FemOperator& op, const Nonlinearity& nl, const NodalField& x)
{
    if (x.size() != op.size()) {
        throw InvalidInput("nemytskii_load_fem: field is not on the operator's mesh");
    }
    std::vector<double> b(op.size());
    fem_nemytskii_load(op.mesh(), nl, x.values(), b);
    return b;
}

FemScheme::FemScheme(std::shared_ptr<const FemOperator> op, double tau, std::optional<Nonlinearity> nl)
    : op_(std::move(op)), tau_(tau), nl_(std::move(nl)),
      system_(cholesky(TridiagonalMatrix::combine(1.0, op_->mass(), tau, op_->stiffness())))
{}

FemScheme::Workspace FemScheme::make_workspace() const
{
    const std::size_t n = dimension();
    return Workspace{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
}

void FemScheme::nemytskii_load(std::span<const double> x, std::span<double> out) const
{
    if (!nl_) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    fem_nemytskii_load(op_->mesh(), *nl_, x, out);
}

void FemScheme::step(std::span<double> x, std::span<const double> normals, Workspace& ws) const
{
    const std::size_t n = dimension();
    op_->mass().multiply(x, ws.rhs);
    op_->mass_cholesky().multiply(normals, ws.noise);
    const double sq = std::sqrt(tau_);
    if (nl_) {
        nemytskii_load(x, ws.load);
        for (std::size_t i = 0; i < n; ++i) {
            ws.rhs[i] += tau_ * ws.load[i] + sq * ws.noise[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            ws.rhs[i] += sq * ws.noise[i];
        }
    }
    system_.forward_solve(ws.rhs);
    system_.backward_solve(ws.rhs);
    std::copy(ws.rhs.begin(), ws.rhs.end(), x.begin());
}

// ---------------------------------------------------------------------------
// Scheme

namespace {

std::variant<SpectralScheme, FemScheme> make_impl(const SchemeConfig& cfg)
{
    if (const auto* s = std::get_if<SpectralVariant>(&cfg.variant)) {
        return SpectralScheme(s->M, cfg.tau, cfg.nonlinearity);
    }
    return FemScheme(std::get<FemVariant>(cfg.variant).op, cfg.tau, cfg.nonlinearity);
}

}  // namespace

Scheme::Scheme(const SchemeConfig& cfg) : tau_(cfg.tau), impl_(make_impl(cfg)) {}

std::size_t Scheme::dimension() const noexcept
{
    return std::visit([](const auto& s) { return s.dimension(); }, impl_);
}

std::vector<double> Scheme::initial_state(const SpectralField& x) const
{
    std::vector<double> state(dimension(), 0.0);
    if (const auto* s = spectral()) {
        const std::size_t n = std::min(s->dimension(), x.mode_count());
        std::copy_n(x.coeffs().begin(), n, state.begin());
        return state;
    }
    const FemOperator& op = fem()->op();
    for (std::size_t k = 0; k < x.mode_count(); ++k) {
        if (x[k] == 0.0) {
            continue;
        }
        const auto b = sine_load(op.mesh(), k);
        for (std::size_t j = 0; j < state.size(); ++j) {
            state[j] += x[k] * b[j];
        }
    }
    op.mass_cholesky().forward_solve(state);
    op.mass_cholesky().backward_solve(state);
    return state;
}

Scheme::Workspace Scheme::make_workspace() const
{
    return std::visit([](const auto& s) -> Workspace { return s.make_workspace(); }, impl_);
}

void Scheme::step(std::span<double> x, std::span<const double> normals, Workspace& ws) const
{
    if (const auto* s = spectral()) {
        s->step(x, normals, std::get<SpectralScheme::Workspace>(ws));
    } else {
        fem()->step(x, normals, std::get<FemScheme::Workspace>(ws));
    }
}

double Scheme::norm_squared(std::span<const double> x) const
{
    if (spectral()) {
        return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    }
    return fem()->op().norm_squared(x);
}

std::vector<double> Scheme::inner_weights(const SpectralField& v) const
{
    std::vector<double> w(dimension(), 0.0);
    if (spectral()) {
        const std::size_t n = std::min(w.size(), v.mode_count());
        std::copy_n(v.coeffs().begin(), n, w.begin());
        return w;
    }
    const Mesh& mesh = fem()->op().mesh();
    for (std::size_t k = 0; k < v.mode_count(); ++k) {
        if (v[k] == 0.0) {
            continue;
        }
        const auto b = sine_load(mesh, k);
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] += v[k] * b[j];
        }
    }
    return w;
}

std::vector<double> Scheme::inner_weights(const NodalField& v) const
{
    if (spectral()) {
        std::vector<double> w(dimension());
        for (std::size_t k = 0; k < w.size(); ++k) {
            const auto b = sine_load(v.mesh(), k);
            w[k] = std::inner_product(b.begin(), b.end(), v.values().begin(), 0.0);
        }
        return w;
    }
    const FemOperator& op = fem()->op();
    if (!(v.mesh() == op.mesh())) {
        throw InvalidInput("inner_weights: nodal direction lives on a different mesh");
    }
    return op.mass().multiply(v.values());
}

std::function<double(std::span<const double>)> Scheme::bind(const TestFunctional& phi) const
{
    using Kind = TestFunctional::Kind;
    switch (phi.kind) {
    case Kind::CosInner: {
        std::vector<double> w;
        if (const auto* s = std::get_if<SpectralField>(&phi.direction)) {
            w = inner_weights(*s);
        } else if (const auto* n = std::get_if<NodalField>(&phi.direction)) {
            w = inner_weights(*n);
        } else {
            throw InvalidInput("cos_inner functional without a direction");
        }
        return [w = std::move(w)](std::span<const double> x) {
            return std::cos(std::inner_product(w.begin(), w.end(), x.begin(), 0.0));
        };
    }
    case Kind::ExpNegSq:
        return [this, s = phi.scale](std::span<const double> x) { return std::exp(-s * norm_squared(x)); };
    case Kind::SecondMomentH:
        return [this](std::span<const double> x) { return norm_squared(x); };
    case Kind::Custom:
        return phi.custom;
    }
    throw InvalidInput("unknown functional kind");
}

SchemeState Scheme::wrap(std::vector<double> x) const
{
    if (spectral()) {
        return SpectralField(std::move(x));
    }
    return fem()->op().make_field(std::move(x));
}

// ---------------------------------------------------------------------------

SpectralField step_spectral(const SpectralField& state, const SchemeConfig& cfg, NoiseSource& src)
{
    const auto* s = std::get_if<SpectralVariant>(&cfg.variant);
    if (!s || state.mode_count() != s->M + 1) {
        throw InvalidInput("step_spectral: state does not match the spectral configuration");
    }
    SpectralScheme scheme(s->M, cfg.tau, cfg.nonlinearity);
    auto ws = scheme.make_workspace();
    const SpectralField xi = sample_noise_spectral(s->M, cfg.tau, src);
    SpectralField next = state;
    scheme.step(next.coeffs(), xi.coeffs(), ws);
    return next;
}

NodalField step_fem(const NodalField& state, const SchemeConfig& cfg, NoiseSource& src)
{
    const auto* f = std::get_if<FemVariant>(&cfg.variant);
    if (!f || state.size() != f->op->size()) {
        throw InvalidInput("step_fem: state does not match the finite element configuration");
    }
    FemScheme scheme(f->op, cfg.tau, cfg.nonlinearity);
    auto ws = scheme.make_workspace();
    std::vector<double> xi(f->op->size());
    src.next_normals(xi);
    std::vector<double> next(state.values().begin(), state.values().end());
    scheme.step(next, xi, ws);
    return f->op->make_field(std::move(next));
}

std::vector<double> simulate_raw(const Scheme& scheme, const SchemeConfig& cfg, const Observer& observer)
{
    std::vector<double> x = scheme.initial_state(cfg.initial);
    std::vector<double> normals(scheme.dimension());
    auto ws = scheme.make_workspace();
    NoiseSource src(cfg.seed, cfg.stream_id);
    for (std::size_t m = 0; m < cfg.steps; ++m) {
        if (observer) {
            observer(m, x);
        }
        src.next_normals(normals);
        scheme.step(x, normals, ws);
    }
    return x;
}

SchemeState simulate(const SchemeConfig& cfg, const Observer& observer)
{
    cfg.validate();
    const Scheme scheme(cfg);
    return scheme.wrap(simulate_raw(scheme, cfg, observer));
}

std::vector<double> synchronous_coupling_gaps(const SchemeConfig& cfg, const SpectralField& x,
                                              const SpectralField& y)
{
    cfg.validate();
    const Scheme scheme(cfg);
    auto a = scheme.initial_state(x);
    auto b = scheme.initial_state(y);
    std::vector<double> normals(scheme.dimension());
    std::vector<double> diff(scheme.dimension());
    auto ws = scheme.make_workspace();
    NoiseSource src(cfg.seed, cfg.stream_id);
    std::vector<double> gaps;
    gaps.reserve(cfg.steps + 1);
    for (std::size_t m = 0;; ++m) {
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = a[i] - b[i];
        }
        gaps.push_back(std::sqrt(scheme.norm_squared(diff)));
        if (m == cfg.steps) {
            break;
        }
        src.next_normals(normals);
        scheme.step(a, normals, ws);
        scheme.step(b, normals, ws);
    }
    return gaps;
}

}  // namespace spde
