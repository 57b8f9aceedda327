#include "nlsw/gluing.hpp"

#include "fft.hpp"
#include "linalg.hpp"
#include "nlsw/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

namespace nlsw {

BumpConfig::BumpConfig(std::vector<long> offsets) : offsets_(std::move(offsets))
{
    if (offsets_.empty())
        throw PreconditionError("bump configuration needs at least one offset");
    if (std::set<long>(offsets_.begin(), offsets_.end()).size() != offsets_.size())
        throw PreconditionError("bump offsets must be distinct");
}

BumpConfig BumpConfig::evenly_spaced(int n, long d)
{
    if (n < 1 || d < 1)
        throw PreconditionError("need n >= 1 bumps and separation d >= 1");
    std::vector<long> a;
    for (int i = 0; i < n; ++i)
        a.push_back(static_cast<long>(std::floor((i - 0.5 * (n - 1)) * static_cast<double>(d))));
    return BumpConfig(std::move(a));
}

long BumpConfig::separation() const
{
    long d = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < offsets_.size(); ++i)
        for (std::size_t j = i + 1; j < offsets_.size(); ++j)
            d = std::min(d, std::abs(offsets_[i] - offsets_[j]));
    return d;
}

double extended_inner(const ExtendedVector& a, const ExtendedVector& b, const SampledPotential& V)
{
    return inner_h1v(a.field, b.field, V) + a.scalar * b.scalar;
}

double extended_norm(const ExtendedVector& a, const SampledPotential& V) { return std::sqrt(extended_inner(a, a, V)); }

Field superpose(const Field& ubar, const BumpConfig& cfg, double lattice)
{
    Field v = Field::zero(ubar.grid());
    for (long a : cfg.offsets())
        v = v + translate(ubar, a, lattice);
    return v;
}

ExtendedVector extended_gradient(const ExtendedPoint& pt, double alpha, const SampledPotential& V,
                                 const Nonlinearity& f)
{
    const double lam = pt.lambda + V.gauge();
    Field field = pt.u - apply_s(f.f(pt.u) + lam * pt.u, V);
    return {std::move(field), -0.5 * (pt.u.mass() - alpha)};
}

ExtendedVector bordered_apply(const ExtendedPoint& pt, const SampledPotential& V, const Nonlinearity& f,
                              const Field& v, double mu)
{
    const double lam = pt.lambda + V.gauge();
    Eigen::VectorXd rhs = f.fprime(pt.u).values().cwiseProduct(v.values()) + lam * v.values() + mu * pt.u.values();
    Field field = v - apply_s(Field(v.grid(), std::move(rhs)), V);
    return {std::move(field), -inner_l2(pt.u, v)};
}

namespace {

// Norm of the extended gradient computed from the L2 residual: ||S r||^2 = (r, S r)_2.
double residual_norm(const Field& u, double lambda, double alpha, const SampledPotential& V, const Nonlinearity& f)
{
    const Field r = l2_residual(u, lambda, V, f);
    const double c = -0.5 * (u.mass() - alpha);
    const double rsr = std::max(0.0, inner_l2(r, apply_s(r, V)));
    return std::sqrt(rsr + c * c);
}

// Bordered matrix [[L, -u], [-u^T, 0]] with L = -D2 + V - λ - f'(u).
Eigen::MatrixXd bordered_matrix(const Eigen::MatrixXd& lap, const Field& u, double lambda, const SampledPotential& V,
                                const Nonlinearity& f)
{
    const Eigen::Index m = u.size();
    Eigen::MatrixXd k(m + 1, m + 1);
    k.topLeftCorner(m, m) = lap;
    for (Eigen::Index i = 0; i < m; ++i)
        k(i, i) += V.values()[i] - lambda - f.fprime(u[i]);
    k.block(0, m, m, 1) = -u.values();
    k.block(m, 0, 1, m) = -u.values().transpose();
    k(m, m) = 0.0;
    return k;
}

} // namespace

ConstrainedCriticalPoint constrained_newton(const Field& u0, double lambda0, double alpha, const SampledPotential& V,
                                            const Nonlinearity& f, const NewtonOptions& opts, NewtonTrace* trace,
                                            long separation)
{
    if (!(alpha > 0.0))
        throw PreconditionError("mass must be positive");
    if (!(u0.grid() == V.grid()))
        throw GridMismatch("initial field and potential live on different grids");
    NewtonTrace local;
    NewtonTrace& tr = trace ? *trace : local;
    tr = NewtonTrace{};

    const double h = u0.grid().h();
    const Eigen::Index m = u0.size();
    const Eigen::MatrixXd lap = laplacian_matrix(u0.grid());
    Field u = u0;
    double lambda = lambda0;
    double norm = residual_norm(u, lambda, alpha, V, f);
    tr.residuals.push_back(norm);
    if (!(norm <= opts.max_initial_residual))
        throw GluingFailed("initial residual " + std::to_string(norm) + " exceeds the admissible " +
                               std::to_string(opts.max_initial_residual),
                           separation, tr.residuals);

    int increases = 0;
    while (norm > opts.tol) {
        if (tr.iterations >= opts.max_iter)
            throw GluingFailed("Newton did not reach tolerance in " + std::to_string(opts.max_iter) + " steps",
                               separation, tr.residuals);
        const linalg::SymmetricIndefinite fac(bordered_matrix(lap, u, lambda, V, f));
        const double rc = fac.rcond();
        if (fac.singular() || rc < opts.rcond_floor)
            throw DegenerateSuperposition("bordered system is numerically singular (rcond " + std::to_string(rc) +
                                          ")");
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = -l2_residual(u, lambda, V, f).values();
        rhs[m] = (h * u.values().squaredNorm() - alpha) / (2.0 * h);
        const Eigen::VectorXd step = fac.solve(rhs);
        const Field v(u.grid(), step.head(m));
        const double mu = step[m];

        double t = 1.0;
        int halvings = 0;
        Field trial = u + v;
        double trial_lambda = lambda + mu;
        double trial_norm = residual_norm(trial, trial_lambda, alpha, V, f);
        while (!(trial_norm < norm) && halvings < opts.max_halvings) {
            t *= 0.5;
            ++halvings;
            trial = u + t * v;
            trial_lambda = lambda + t * mu;
            trial_norm = residual_norm(trial, trial_lambda, alpha, V, f);
        }
        if (!std::isfinite(trial_norm))
            throw GluingFailed("Newton produced a non-finite iterate", separation, tr.residuals);
        increases = trial_norm < norm ? 0 : increases + 1;
        u = std::move(trial);
        lambda = trial_lambda;
        norm = trial_norm;
        ++tr.iterations;
        tr.halvings.push_back(halvings);
        tr.residuals.push_back(norm);
        if (increases >= opts.max_increases)
            throw GluingFailed("Newton residual increased over " + std::to_string(increases) + " consecutive steps",
                               separation, tr.residuals);
    }
    ConstrainedCriticalPoint pt = make_point(u, lambda, alpha, V, f);
    pt.iterations = tr.iterations;
    return pt;
}

GlueResult glue(const ConstrainedCriticalPoint& ubar, const BumpConfig& cfg, double alpha, const SampledPotential& V,
                const Nonlinearity& f, const NewtonOptions& opts, double lattice)
{
    const int n = cfg.n();
    if (std::abs(alpha - n * ubar.mass) > 1e-12 * std::max(1.0, alpha))
        throw PreconditionError("glued mass " + std::to_string(alpha) + " differs from " + std::to_string(n) +
                                " times the bump mass " + std::to_string(ubar.mass));
    if (lattice == 0.0)
        lattice = V.potential().periodic() ? V.potential().period() : 1.0;
    const Field base = resample(ubar.u, V.grid());
    const GridSpec& grid = V.grid();

    // Bumps and ten decay lengths must fit in the box.
    Eigen::Index peak = 0;
    base.values().cwiseAbs().maxCoeff(&peak);
    const double gap = V.bottom() - ubar.lambda;
    const double decay = gap > 0.0 ? 1.0 / std::sqrt(gap) : std::numeric_limits<double>::infinity();
    for (long a : cfg.offsets()) {
        const double pos = grid.x(peak) + static_cast<double>(a) * lattice;
        if (std::abs(pos) + 10.0 * decay >= grid.L)
            throw PreconditionError("bump at " + std::to_string(pos) + " with decay length " +
                                    std::to_string(decay) + " does not fit in the box of half width " +
                                    std::to_string(grid.L));
    }

    GlueResult res;
    res.separation = cfg.separation();
    res.superposition = superpose(base, cfg, lattice);
    res.point = constrained_newton(res.superposition, ubar.lambda, alpha, V, f, opts, &res.trace, res.separation);
    res.initial_residual = res.trace.residuals.front();
    res.distance = norm_h1v(res.point.u - res.superposition, V);
    res.lambda_shift = std::abs(res.point.lambda - ubar.lambda);
    return res;
}

namespace {

// G = diag(h A, 1) with A = -D2 + V + c
Eigen::MatrixXd metric_matrix(const Eigen::MatrixXd& lap, const SampledPotential& V)
{
    const Eigen::Index m = lap.rows();
    const double h = V.grid().h();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m + 1, m + 1);
    g.topLeftCorner(m, m) = h * lap;
    for (Eigen::Index i = 0; i < m; ++i)
        g(i, i) += h * (V.values()[i] + V.gauge());
    g(m, m) = 1.0;
    return g;
}

Eigen::MatrixXd scaled_bordered(const Eigen::MatrixXd& lap, const ExtendedPoint& pt, const SampledPotential& V,
                                const Nonlinearity& f)
{
    Eigen::MatrixXd k = bordered_matrix(lap, pt.u, pt.lambda, V, f);
    const Eigen::Index m = pt.u.size();
    k.topLeftCorner(m, m) *= V.grid().h();
    k.block(0, m, m, 1) *= V.grid().h();
    k.block(m, 0, 1, m) *= V.grid().h();
    return k;
}

double g_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(g * x))); }

} // namespace

SigmaEstimate bordered_sigma_min(const ExtendedPoint& pt, const SampledPotential& V, const Nonlinearity& f,
                                 int max_iter, double rel_tol)
{
    V.require_positive();
    const Eigen::MatrixXd lap = laplacian_matrix(V.grid());
    const Eigen::MatrixXd g = metric_matrix(lap, V);
    const linalg::SymmetricIndefinite fac(scaled_bordered(lap, pt, V, f));
    SigmaEstimate est;
    if (fac.singular())
        return est;

    // Inverse iteration on B^{-2}, B = G^{-1}K, which is self-adjoint for G.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(g.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = normal(rng);
    x /= g_norm(g, x);
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd y = fac.solve(g * x);
        const Eigen::VectorXd z = fac.solve(g * y);
        // ||B^{-1} x||_G^2 = <x, B^{-2} x>_G for unit x
        const double inv_sq = x.dot(g * z);
        const double sigma = 1.0 / std::sqrt(std::max(inv_sq, 1e-300));
        est.sigma_min = sigma;
        est.iterations = it;
        if (it > 1 && std::abs(sigma - prev) <= rel_tol * sigma) {
            est.converged = true;
            break;
        }
        prev = sigma;
        x = z / g_norm(g, z);
    }
    return est;
}

ExtendedVector random_direction(const GridSpec& grid, const SampledPotential& V, double radius, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const int n = grid.M;
    // random Fourier coefficients up to wavenumber 8π, i.e. features of size ~1/4
    std::vector<fft::cplx> hat(n / 2 + 1, fft::cplx(0.0));
    const double dk = std::numbers::pi / grid.L;
    for (int j = 0; j <= n / 2 && dk * j <= 8.0 * std::numbers::pi; ++j)
        hat[j] = fft::cplx(normal(rng), j == 0 ? 0.0 : normal(rng));
    Eigen::VectorXd v(n);
    fft::c2r(hat.data(), v.data(), n);
    ExtendedVector dir{Field(grid, std::move(v)), normal(rng)};
    const double s = radius / extended_norm(dir, V);
    return {s * dir.field, s * dir.scalar};
}

ShadowingReport shadowing_certificate(const ExtendedPoint& pt0, double alpha, const SampledPotential& V,
                                      const Nonlinearity& f, double delta, double q, int samples, std::uint64_t seed)
{
    if (!(q > 0.0 && q < 1.0))
        throw PreconditionError("contraction factor q must lie in (0, 1)");
    if (!(delta > 0.0))
        throw PreconditionError("ball radius must be positive");
    ShadowingReport rep;
    rep.delta = delta;
    rep.q = q;
    rep.samples = samples;
    rep.residual_norm = extended_norm(extended_gradient(pt0, alpha, V, f), V);
    const SigmaEstimate sig = bordered_sigma_min(pt0, V, f);
    rep.sigma_min = sig.sigma_min;
    rep.sigma_converged = sig.converged;
    rep.invertible = sig.sigma_min > 0.0;
    rep.inverse_norm = rep.invertible ? 1.0 / sig.sigma_min : std::numeric_limits<double>::infinity();

    const Eigen::MatrixXd lap = laplacian_matrix(V.grid());
    const Eigen::MatrixXd g = metric_matrix(lap, V);
    const Eigen::LLT<Eigen::MatrixXd> g_inv(g);
    if (g_inv.info() != Eigen::Success)
        throw AssumptionViolation("metric of H^1 x R is not positive definite");
    const double h = V.grid().h();
    const Eigen::Index m = pt0.u.size();

    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const ExtendedVector dir = random_direction(V.grid(), V, delta, seed + 1000u * static_cast<unsigned>(s));
        const ExtendedPoint y{pt0.u + dir.field, pt0.lambda + dir.scalar};
        // K(y) - K(v0) is diagonal plus a border
        Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(m + 1, m + 1);
        for (Eigen::Index i = 0; i < m; ++i)
            dk(i, i) = h * (-(f.fprime(y.u[i]) - f.fprime(pt0.u[i])) - dir.scalar);
        dk.block(0, m, m, 1) = -h * dir.field.values();
        dk.block(m, 0, 1, m) = -h * dir.field.values().transpose();

        // power iteration for the G-norm of G^{-1} dk, which is G-self-adjoint
        std::mt19937_64 rng(seed + 17u * static_cast<unsigned>(s));
        std::normal_distribution<double> normal;
        Eigen::VectorXd x(m + 1);
        for (Eigen::Index i = 0; i <= m; ++i)
            x[i] = normal(rng);
        x /= g_norm(g, x);
        double est = 0.0, prev = 0.0;
        for (int it = 0; it < 100; ++it) {
            const Eigen::VectorXd y1 = g_inv.solve(dk * x);
            const Eigen::VectorXd y2 = g_inv.solve(dk * y1);
            est = std::sqrt(std::max(0.0, x.dot(g * y2)));
            if (it > 0 && std::abs(est - prev) <= 1e-6 * est)
                break;
            prev = est;
            const double nz = g_norm(g, y2);
            if (nz == 0.0)
                break;
            x = y2 / nz;
        }
        worst = std::max(worst, est);
    }
    rep.lipschitz = worst;
    rep.condition_ii = rep.invertible && rep.residual_norm < delta * (1.0 - q) * rep.sigma_min;
    rep.condition_iii = rep.invertible && rep.lipschitz <= q * rep.sigma_min;
    return rep;
}

} // namespace nlsw
