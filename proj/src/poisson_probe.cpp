#include "spde/poisson_probe.hpp"

#include "spde/csv.hpp"
#include "spde/ergodic.hpp"
#include "spde/error.hpp"
#include "spde/parallel.hpp"
#include "spde/scheme.hpp"
#include "spde/spectral.hpp"

#include <cmath>
#include <numeric>

namespace spde {

namespace {

// Replicas are split into a fixed number of chunks whose partial sums are merged in
// chunk order, so results do not depend on the thread count.
constexpr std::size_t kChunks = 256;

struct ChunkRange {
    std::size_t begin;
    std::size_t end;
};

ChunkRange chunk_range(std::size_t chunk, std::size_t chunks, std::size_t total)
{
    return {chunk * total / chunks, (chunk + 1) * total / chunks};
}

// Advances a point of H_M across one grid interval: exact OU transition for linear
// systems, `substeps` semi-implicit Euler steps otherwise.
class PathStepper {
public:
    PathStepper(const GalerkinSystem& sys, double dt, std::size_t substeps)
        : dim_(sys.dimension()), linear_(sys.is_linear()), substeps_(linear_ ? 1 : substeps),
          fine_(sys.M, dt / static_cast<double>(substeps_), sys.nonlinearity)
    {
        for (std::size_t k = 0; k < dim_; ++k) {
            const double lambda = sys.lambda(k);
            decay_.push_back(std::exp(-lambda * dt));
            spread_.push_back(std::sqrt(-std::expm1(-2.0 * lambda * dt) / (2.0 * lambda)));
        }
    }

    [[nodiscard]] std::size_t normals_per_interval() const noexcept { return dim_ * substeps_; }
    [[nodiscard]] SpectralScheme::Workspace make_workspace() const { return fine_.make_workspace(); }

    void advance(std::span<double> x, std::span<const double> normals, SpectralScheme::Workspace& ws) const
    {
        if (linear_) {
            for (std::size_t k = 0; k < dim_; ++k) {
                x[k] = decay_[k] * x[k] + spread_[k] * normals[k];
            }
            return;
        }
        for (std::size_t s = 0; s < substeps_; ++s) {
            fine_.step(x, normals.subspan(s * dim_, dim_), ws);
        }
    }

private:
    std::size_t dim_;
    bool linear_;
    std::size_t substeps_;
    SpectralScheme fine_;
    std::vector<double> decay_;
    std::vector<double> spread_;
};

// Composite Simpson weights on n (even) intervals of width h.
std::vector<double> simpson_weights(std::size_t n, double h)
{
    std::vector<double> w(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        w[i] = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[i] *= h / 3.0;
    }
    return w;
}

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) noexcept
    {
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Moments& o) noexcept
    {
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    [[nodiscard]] double mean(std::size_t n) const noexcept { return sum / static_cast<double>(n); }
    [[nodiscard]] double stderr_of_mean(std::size_t n) const noexcept
    {
        if (n < 2) {
            return 0.0;
        }
        const double m = mean(n);
        const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

}  // namespace

GalerkinSystem GalerkinSystem::make(std::size_t M, std::optional<Nonlinearity> nl, TestFunctional phi)
{
    if (M + 1 > kMaxModes) {
        throw InvalidInput("GalerkinSystem: at most " + std::to_string(kMaxModes) + " modes");
    }
    return GalerkinSystem{M, std::move(nl), std::move(phi), 0.0};
}

double GalerkinSystem::lambda(std::size_t k) const noexcept
{
    return eigenvalue(k);
}

Point GalerkinSystem::drift(std::span<const double> x) const
{
    Point d(dimension(), 0.0);
    if (nonlinearity) {
        const SpectralScheme scheme(M, 1.0, nonlinearity);
        auto ws = scheme.make_workspace();
        scheme.nemytskii(x, d, ws);
    }
    for (std::size_t k = 0; k < dimension(); ++k) {
        d[k] -= lambda(k) * x[k];
    }
    return d;
}

PhibarEstimate estimate_phibar(const GalerkinSystem& sys, const PhibarBudget& budget)
{
    using Kind = TestFunctional::Kind;
    if (sys.is_linear() && sys.phi.kind != Kind::Custom) {
        std::vector<double> var(sys.dimension());
        for (std::size_t k = 0; k < var.size(); ++k) {
            var[k] = 1.0 / (2.0 * sys.lambda(k));
        }
        switch (sys.phi.kind) {
        case Kind::CosInner: {
            const auto* v = std::get_if<SpectralField>(&sys.phi.direction);
            if (!v) {
                throw InvalidInput("estimate_phibar: cos_inner needs a spectral direction");
            }
            double q = 0.0;
            for (std::size_t k = 0; k < std::min(var.size(), v->mode_count()); ++k) {
                q += (*v)[k] * (*v)[k] * var[k];
            }
            return {std::exp(-0.5 * q), 0.0, true};
        }
        case Kind::ExpNegSq: {
            double p = 1.0;
            for (double s2 : var) {
                p /= std::sqrt(1.0 + 2.0 * sys.phi.scale * s2);
            }
            return {p, 0.0, true};
        }
        case Kind::SecondMomentH:
            return {std::accumulate(var.begin(), var.end(), 0.0), 0.0, true};
        case Kind::Custom:
            break;
        }
    }
    SchemeConfig cfg;
    cfg.variant = SpectralVariant{sys.M};
    cfg.tau = budget.tau;
    cfg.steps = budget.steps;
    cfg.burn_in = budget.burn_in;
    cfg.nonlinearity = sys.nonlinearity;
    cfg.seed = budget.seed;
    cfg.functional = sys.phi;
    const auto est = estimate_invariant_functional(cfg, budget.replicas, EstimateOptions{budget.threads});
    return {est.mean, est.halfwidth, false};
}

std::vector<PoissonEstimate> poisson_solution_estimates(const GalerkinSystem& sys, std::span<const Point> points,
                                                        double t_max, std::size_t replicas,
                                                        const PoissonOptions& opts)
{
    if (!(t_max > 0.0) || !(opts.dt > 0.0)) {
        throw InvalidInput("poisson_solution_estimate: T_max and dt must be positive");
    }
    if (replicas < 2) {
        throw InvalidInput("poisson_solution_estimate: need at least two replicas");
    }
    for (const auto& p : points) {
        if (p.size() != sys.dimension()) {
            throw InvalidInput("poisson_solution_estimate: point dimension does not match M+1");
        }
    }
    std::size_t n = static_cast<std::size_t>(std::ceil(t_max / opts.dt));
    n += n % 2;
    const double h = t_max / static_cast<double>(n);
    const std::size_t intervals = opts.check_tail ? 2 * n : n;
    const auto w_short = simpson_weights(n, h);
    const auto w_long = simpson_weights(2 * n, h);

    const PathStepper stepper(sys, h, opts.substeps);
    const std::size_t per_interval = stepper.normals_per_interval();
    const std::size_t np = points.size();
    const std::size_t chunks = std::min(kChunks, replicas);

    // Per chunk and point: moments of I(T), I(2T) - I(T).
    std::vector<std::vector<Moments>> value_moments(chunks, std::vector<Moments>(np));
    std::vector<std::vector<Moments>> shift_moments(chunks, std::vector<Moments>(np));

    parallel_for(chunks, opts.threads, [&](std::size_t c) {
        std::vector<double> normals(intervals * per_interval);
        std::vector<Point> state(np);
        std::vector<double> i_short(np);
        std::vector<double> i_long(np);
        auto ws = stepper.make_workspace();
        const auto range = chunk_range(c, chunks, replicas);
        for (std::size_t r = range.begin; r < range.end; ++r) {
            NoiseSource(opts.seed, r).normals_at(0, normals);
            for (std::size_t p = 0; p < np; ++p) {
                state[p] = points[p];
                i_short[p] = 0.0;
                i_long[p] = 0.0;
            }
            for (std::size_t i = 0; i <= intervals; ++i) {
                for (std::size_t p = 0; p < np; ++p) {
                    const double f = evaluate_spectral(sys.phi, state[p]) - sys.phibar;
                    if (i <= n) {
                        i_short[p] += w_short[i] * f;
                    }
                    if (opts.check_tail) {
                        i_long[p] += w_long[i] * f;
                    }
                    if (i < intervals) {
                        stepper.advance(state[p],
                                        std::span<const double>(normals).subspan(i * per_interval, per_interval),
                                        ws);
                    }
                }
            }
            for (std::size_t p = 0; p < np; ++p) {
                value_moments[c][p].add(i_short[p]);
                shift_moments[c][p].add(i_long[p] - i_short[p]);
            }
        }
    });

    std::vector<PoissonEstimate> out(np);
    for (std::size_t p = 0; p < np; ++p) {
        Moments value;
        Moments shift;
        for (std::size_t c = 0; c < chunks; ++c) {
            value.merge(value_moments[c][p]);
            shift.merge(shift_moments[c][p]);
        }
        auto& e = out[p];
        e.x = points[p];
        e.value = value.mean(replicas);
        e.mc_halfwidth = kZ95 * value.stderr_of_mean(replicas);
        e.t_max = t_max;
        e.replicas = replicas;
        if (opts.check_tail) {
            e.tail_shift = shift.mean(replicas);
            e.tail_stderr = shift.stderr_of_mean(replicas);
            if (std::abs(e.tail_shift) > e.mc_halfwidth + kZ95 * e.tail_stderr) {
                throw TailNotConverged("doubling T_max=" + csv::format(t_max) + " moved Psi by " +
                                       csv::format(e.tail_shift) + ", beyond the Monte Carlo halfwidth");
            }
        }
    }
    return out;
}

PoissonEstimate poisson_solution_estimate(const GalerkinSystem& sys, const Point& x, double t_max,
                                          std::size_t replicas, const PoissonOptions& opts)
{
    return poisson_solution_estimates(sys, std::span<const Point>(&x, 1), t_max, replicas, opts).front();
}

std::vector<Point> fd_stencil(const Point& x, double delta)
{
    std::vector<Point> pts{x};
    for (std::size_t i = 0; i < x.size(); ++i) {
        Point plus = x;
        Point minus = x;
        plus[i] = x[i] + delta;
        minus[i] = x[i] - delta;
        pts.push_back(std::move(plus));
        pts.push_back(std::move(minus));
    }
    return pts;
}

double generator_apply_fd(const GalerkinSystem& sys, const std::function<double(std::span<const double>)>& psi,
                          const Point& x, double delta)
{
    if (!(delta > 0.0)) {
        throw InvalidInput("generator_apply_fd: delta must be positive");
    }
    if (x.size() != sys.dimension()) {
        throw InvalidInput("generator_apply_fd: point dimension does not match M+1");
    }
    const auto pts = fd_stencil(x, delta);
    const double centre = psi(pts[0]);
    const Point b = sys.drift(x);
    double value = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double plus = psi(pts[1 + 2 * i]);
        const double minus = psi(pts[2 + 2 * i]);
        const double grad = (plus - minus) / (2.0 * delta);
        const double second = (plus - 2.0 * centre + minus) / (delta * delta);
        value += b[i] * grad + 0.5 * second;
    }
    return value;
}

PoissonResidual poisson_residual(const GalerkinSystem& sys, const Point& x, double delta, double t_max,
                                 std::size_t replicas, const PoissonOptions& opts)
{
    const auto pts = fd_stencil(x, delta);
    const auto est = poisson_solution_estimates(sys, pts, t_max, replicas, opts);
    const auto lookup = [&](std::span<const double> p) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (std::equal(p.begin(), p.end(), pts[i].begin(), pts[i].end())) {
                return est[i].value;
            }
        }
        throw InvalidInput("poisson_residual: point outside the precomputed stencil");
    };
    PoissonResidual r;
    r.x = x;
    r.psi = est[0].value;
    r.generator = generator_apply_fd(sys, lookup, x, delta);
    r.target = evaluate_spectral(sys.phi, x) - sys.phibar;
    r.residual = std::abs(r.generator + r.target);
    return r;
}

VariationalPath variational_flow(const GalerkinSystem& sys, const Point& x, const Point& h, double tau,
                                 std::size_t steps, const NoiseSource& src)
{
    const std::size_t dim = sys.dimension();
    if (x.size() != dim || h.size() != dim) {
        throw InvalidInput("variational_flow: dimension mismatch");
    }
    const SpectralScheme scheme(sys.M, tau, sys.nonlinearity);
    auto ws = scheme.make_workspace();
    std::vector<double> normals(steps * dim);
    src.normals_at(0, normals);
    Point state = x;
    Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(dim));
    for (std::size_t n = 0; n < steps; ++n) {
        if (sys.nonlinearity) {
            eta += tau * scheme.nemytskii_jacobian(state, ws) * eta;
        }
        for (std::size_t k = 0; k < dim; ++k) {
            eta(static_cast<Eigen::Index>(k)) /= 1.0 + tau * sys.lambda(k);
        }
        scheme.step(state, std::span<const double>(normals).subspan(n * dim, dim), ws);
    }
    return {state, Point(eta.data(), eta.data() + eta.size())};
}

BelGradient bel_gradient(const GalerkinSystem& sys, double t, const Point& x, std::size_t replicas,
                         const BelOptions& opts)
{
    if (!(t > 0.0) || !(opts.dt > 0.0)) {
        throw InvalidInput("bel_gradient: t and dt must be positive");
    }
    if (replicas < 2) {
        throw InvalidInput("bel_gradient: need at least two replicas");
    }
    const std::size_t dim = sys.dimension();
    if (x.size() != dim) {
        throw InvalidInput("bel_gradient: point dimension does not match M+1");
    }
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t / opts.dt)));
    const double tau = t / static_cast<double>(steps);
    const double sq = std::sqrt(tau);
    const SpectralScheme scheme(sys.M, tau, sys.nonlinearity);
    Eigen::VectorXd resolvent(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        resolvent(static_cast<Eigen::Index>(k)) = 1.0 / (1.0 + tau * sys.lambda(k));
    }
    const auto d = static_cast<Eigen::Index>(dim);
    const std::size_t chunks = std::min(kChunks, replicas);
    std::vector<std::vector<Moments>> moments(chunks, std::vector<Moments>(dim));

    parallel_for(chunks, opts.threads, [&](std::size_t c) {
        std::vector<double> normals(steps * dim);
        auto ws = scheme.make_workspace();
        const auto range = chunk_range(c, chunks, replicas);
        for (std::size_t r = range.begin; r < range.end; ++r) {
            NoiseSource(opts.seed, r).normals_at(0, normals);
            Point state = x;
            // Column i is the first variation in direction e_i.
            Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(d, d);
            Eigen::VectorXd ito = Eigen::VectorXd::Zero(d);
            for (std::size_t n = 0; n < steps; ++n) {
                const auto z = std::span<const double>(normals).subspan(n * dim, dim);
                const Eigen::Map<const Eigen::VectorXd> zv(z.data(), d);
                ito.noalias() += sq * (eta.transpose() * zv);
                if (sys.nonlinearity) {
                    eta += tau * scheme.nemytskii_jacobian(state, ws) * eta;
                }
                eta = resolvent.asDiagonal() * eta;
                scheme.step(state, z, ws);
            }
            const double phi = evaluate_spectral(sys.phi, state);
            for (std::size_t i = 0; i < dim; ++i) {
                moments[c][i].add(ito(static_cast<Eigen::Index>(i)) * phi / t);
            }
        }
    });

    BelGradient out{Point(dim), Point(dim)};
    for (std::size_t i = 0; i < dim; ++i) {
        Moments m;
        for (std::size_t c = 0; c < chunks; ++c) {
            m.merge(moments[c][i]);
        }
        out.gradient[i] = m.mean(replicas);
        out.standard_error[i] = m.stderr_of_mean(replicas);
    }
    return out;
}

std::string probe_csv_header()
{
    return "M,phi,x,psi_hat,residual,T_max,replicas,seed";
}

std::string probe_csv_row(const GalerkinSystem& sys, const PoissonResidual& r, double t_max,
                          std::size_t replicas, std::uint64_t seed)
{
    std::string xs;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        xs += (i ? ";" : "") + csv::format(r.x[i]);
    }
    return csv::join({std::to_string(sys.M), sys.phi.name(), xs, csv::format(r.psi), csv::format(r.residual),
                      csv::format(t_max), std::to_string(replicas), std::to_string(seed)});
}

}  // namespace spde
