#include "spde/fem.hpp"

#include "spde/error.hpp"
#include "spde/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

namespace spde {

namespace {

struct GaussRule {
    std::array<double, 5> points{};  // on [-1, 1]
    std::array<double, 5> weights{};
    std::size_t count = 0;
};

constexpr GaussRule kGauss2{{-0.57735026918962576451, 0.57735026918962576451}, {1.0, 1.0}, 2};

constexpr GaussRule kGauss5{
    {-0.90617984593866399280, -0.53846931010568309104, 0.0, 0.53846931010568309104,
     0.90617984593866399280},
    {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889, 0.47862867049936646804,
     0.23692688505618908751},
    5};

// Nodal value at global node index i (0 and N+1 are boundary nodes).
double node_value(std::span<const double> interior, std::size_t i) noexcept
{
    return (i == 0 || i == interior.size() + 1) ? 0.0 : interior[i - 1];
}

}  // namespace

NodalField::NodalField(std::shared_ptr<const Mesh> mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values))
{
    if (!mesh_ || values_.size() != mesh_->interior_count()) {
        throw InvalidInput("NodalField: value count does not match mesh interior node count");
    }
}

double NodalField::evaluate_at(double xi) const noexcept
{
    const auto nodes = mesh_->nodes();
    if (xi <= 0.0 || xi >= 1.0) {
        return 0.0;
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), xi);
    const auto e = static_cast<std::size_t>(it - nodes.begin()) - 1;
    const double a = nodes[e];
    const double b = nodes[e + 1];
    const double t = (xi - a) / (b - a);
    return (1.0 - t) * node_value(values_, e) + t * node_value(values_, e + 1);
}

struct FemOperator::EigenCache {
    std::once_flag once;
    std::vector<GeneralizedEigenpair> pairs;
    std::vector<double> lambdas;
};

FemOperator::FemOperator(Mesh mesh)
    : mesh_(std::make_shared<const Mesh>(std::move(mesh))), cache_(std::make_shared<EigenCache>())
{
    const std::size_t n = mesh_->interior_count();
    mass_ = TridiagonalMatrix(n);
    stiffness_ = TridiagonalMatrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double left = mesh_->gap(j);
        const double right = mesh_->gap(j + 1);
        mass_.diag[j] = (left + right) / 3.0;
        stiffness_.diag[j] = 1.0 / left + 1.0 / right;
        if (j + 1 < n) {
            mass_.sub[j] = mass_.super[j] = right / 6.0;
            stiffness_.sub[j] = stiffness_.super[j] = -1.0 / right;
        }
    }
    mass_chol_ = cholesky(mass_);
    // K_h must be SPD as well; a failure here means the assembly is broken.
    static_cast<void>(cholesky(stiffness_));
}

const std::vector<GeneralizedEigenpair>& FemOperator::eigenpairs() const
{
    std::call_once(cache_->once, [this] {
        const auto n = static_cast<Eigen::Index>(size());
        // C = L^{-1} K L^{-T}, computed column by column with the bidiagonal factor.
        Eigen::MatrixXd Y = stiffness_.to_dense();
        for (Eigen::Index c = 0; c < n; ++c) {
            mass_chol_.forward_solve(std::span<double>(Y.col(c).data(), static_cast<std::size_t>(n)));
        }
        Eigen::MatrixXd C = Y.transpose();
        for (Eigen::Index c = 0; c < n; ++c) {
            mass_chol_.forward_solve(std::span<double>(C.col(c).data(), static_cast<std::size_t>(n)));
        }
        C = 0.5 * (C + C.transpose()).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C);
        if (solver.info() != Eigen::Success) {
            throw ConvergenceFailure("generalized_eigs: symmetric eigensolver did not converge");
        }
        auto& pairs = cache_->pairs;
        pairs.resize(static_cast<std::size_t>(n));
        cache_->lambdas.resize(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) {
            std::vector<double> v(solver.eigenvectors().col(j).data(),
                                  solver.eigenvectors().col(j).data() + n);
            mass_chol_.backward_solve(v);
            // Sign convention: largest-magnitude entry positive.
            const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) {
                return std::abs(a) < std::abs(b);
            });
            if (*big < 0.0) {
                for (double& x : v) {
                    x = -x;
                }
            }
            const auto idx = static_cast<std::size_t>(j);
            pairs[idx].lambda = solver.eigenvalues()(j);
            pairs[idx].vector = std::move(v);
            cache_->lambdas[idx] = pairs[idx].lambda;
        }
    });
    return cache_->pairs;
}

std::span<const double> FemOperator::eigenvalues() const
{
    static_cast<void>(eigenpairs());
    return cache_->lambdas;
}

double FemOperator::norm_squared(std::span<const double> x) const
{
    const auto Mx = mass_.multiply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * Mx[i];
    }
    return s;
}

std::vector<double> FemOperator::eigen_coordinates(std::span<const double> x) const
{
    const auto& pairs = eigenpairs();
    const auto Mx = mass_.multiply(x);
    std::vector<double> c(pairs.size());
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < Mx.size(); ++i) {
            s += pairs[j].vector[i] * Mx[i];
        }
        c[j] = s;
    }
    return c;
}

double FemOperator::discrete_sobolev_norm(double alpha, std::span<const double> x) const
{
    const auto c = eigen_coordinates(x);
    const auto lambdas = eigenvalues();
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double v = std::pow(lambdas[j], alpha) * c[j];
        s += v * v;
    }
    return std::sqrt(s);
}

NodalField FemOperator::make_field(std::vector<double> values) const
{
    return NodalField(mesh_, std::move(values));
}

FemOperator assemble(const Mesh& mesh)
{
    return FemOperator(mesh);
}

const std::vector<GeneralizedEigenpair>& generalized_eigs(const FemOperator& op)
{
    return op.eigenpairs();
}

std::vector<double> load_vector(const Mesh& mesh, const ScalarFunction& f)
{
    const std::size_t n = mesh.interior_count();
    const auto nodes = mesh.nodes();
    std::vector<double> b(n, 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double a = nodes[e];
        const double g = nodes[e + 1] - a;
        double to_left = 0.0;
        double to_right = 0.0;
        for (std::size_t q = 0; q < kGauss2.count; ++q) {
            const double t = 0.5 * (kGauss2.points[q] + 1.0);
            const double w = 0.5 * g * kGauss2.weights[q];
            const double fv = f(a + t * g);
            to_left += w * fv * (1.0 - t);
            to_right += w * fv * t;
        }
        if (e >= 1) {
            b[e - 1] += to_left;
        }
        if (e < n) {
            b[e] += to_right;
        }
    }
    return b;
}

std::vector<double> sine_load(const Mesh& mesh, std::size_t k)
{
    // int phi_i sin(w xi) = -(1/w^2) [ (sin wa - sin wb)/(b-a) + (sin wc - sin wb)/(c-b) ]
    const double w = static_cast<double>(k + 1) * kPi;
    const std::size_t n = mesh.interior_count();
    const auto x = mesh.nodes();
    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = x[j];
        const double m = x[j + 1];
        const double c = x[j + 2];
        const double left = -2.0 * std::cos(0.5 * w * (a + m)) * std::sin(0.5 * w * (m - a)) / (m - a);
        const double right = 2.0 * std::cos(0.5 * w * (m + c)) * std::sin(0.5 * w * (c - m)) / (c - m);
        b[j] = -std::sqrt(2.0) * (left + right) / (w * w);
    }
    return b;
}

NodalField l2_project(const FemOperator& op, const ScalarFunction& f)
{
    auto b = load_vector(op.mesh(), f);
    op.mass_cholesky().forward_solve(b);
    op.mass_cholesky().backward_solve(b);
    return op.make_field(std::move(b));
}

NodalField ritz_project(const FemOperator& op, const ScalarFunction& f)
{
    constexpr double boundary_tol = 1e-12;
    if (std::abs(f(0.0)) > boundary_tol || std::abs(f(1.0)) > boundary_tol) {
        throw InvalidInput("ritz_project: f must vanish at 0 and 1");
    }
    const Mesh& mesh = op.mesh();
    const auto x = mesh.nodes();
    const std::size_t n = mesh.interior_count();
    std::vector<double> fv(n + 2);
    for (std::size_t i = 0; i < n + 2; ++i) {
        fv[i] = f(x[i]);
    }
    // phi_j' is piecewise constant, so int_e f' phi_j' is the exact difference quotient.
    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i = j + 1;
        b[j] = (fv[i] - fv[i - 1]) / mesh.gap(i - 1) - (fv[i + 1] - fv[i]) / mesh.gap(i);
    }
    return op.make_field(thomas_solve(op.stiffness(), b));
}

double trace_neg_half_power(const FemOperator& op, double kappa)
{
    if (!(kappa > 0.0 && kappa < 0.5)) {
        throw InvalidInput("trace_neg_half_power: kappa must lie in (0, 1/2)");
    }
    double s = 0.0;
    for (double lambda : op.eigenvalues()) {
        s += std::pow(lambda, -0.5 - kappa);
    }
    return s;
}

NodalField semi_implicit_solve(const FemOperator& op, double tau, std::span<const double> rhs)
{
    if (!(tau >= 0.0)) {
        throw InvalidInput("semi_implicit_solve: tau must be nonnegative");
    }
    if (rhs.size() != op.size()) {
        throw InvalidInput("semi_implicit_solve: rhs size mismatch");
    }
    const auto system = TridiagonalMatrix::combine(1.0, op.mass(), tau, op.stiffness());
    return op.make_field(thomas_solve(system, rhs));
}

double l2_distance(const NodalField& x, const ScalarFunction& f)
{
    const Mesh& mesh = x.mesh();
    const auto nodes = mesh.nodes();
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double a = nodes[e];
        const double g = nodes[e + 1] - a;
        const double va = node_value(x.values(), e);
        const double vb = node_value(x.values(), e + 1);
        for (std::size_t q = 0; q < kGauss5.count; ++q) {
            const double t = 0.5 * (kGauss5.points[q] + 1.0);
            const double d = (1.0 - t) * va + t * vb - f(a + t * g);
            s += 0.5 * g * kGauss5.weights[q] * d * d;
        }
    }
    return std::sqrt(s);
}

double h1_seminorm_distance(const NodalField& x, const ScalarFunction& df)
{
    const Mesh& mesh = x.mesh();
    const auto nodes = mesh.nodes();
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double a = nodes[e];
        const double g = nodes[e + 1] - a;
        const double slope = (node_value(x.values(), e + 1) - node_value(x.values(), e)) / g;
        for (std::size_t q = 0; q < kGauss5.count; ++q) {
            const double t = 0.5 * (kGauss5.points[q] + 1.0);
            const double d = slope - df(a + t * g);
            s += 0.5 * g * kGauss5.weights[q] * d * d;
        }
    }
    return std::sqrt(s);
}

std::size_t smoothing_violations(std::span<const double> lambdas, double kappa, double tau, std::size_t j_max,
                                 double lambda0)
{
    if (!(tau > 0.0) || !(kappa >= 0.0 && kappa <= 1.0) || !(lambda0 > 0.0)) {
        throw InvalidInput("smoothing_violations: need tau > 0, kappa in [0, 1], lambda0 > 0");
    }
    std::size_t violations = 0;
    for (std::size_t j = 1; j <= j_max; ++j) {
        const double jd = static_cast<double>(j);
        const double log_bound = -(1.0 - kappa) * std::log(jd * tau) - jd * kappa * std::log1p(lambda0 * tau);
        for (double lambda : lambdas) {
            if (lambda < lambda0) {
                throw InvalidInput("smoothing_violations: eigenvalue below lambda0");
            }
            const double log_symbol = (1.0 - kappa) * std::log(lambda) - jd * std::log1p(lambda * tau);
            if (log_symbol > log_bound + 1e-12) {
                ++violations;
            }
        }
    }
    return violations;
}

}  // namespace spde
