#include "nlsw/stationary.hpp"

#include "nlsw/error.hpp"
#include "nlsw/gluing.hpp"

#include <cmath>
#include <string>

namespace nlsw {

ConstrainedCriticalPoint make_point(const Field& u, double lambda, double mass, const SampledPotential& V,
                                    const Nonlinearity& f)
{
    ConstrainedCriticalPoint pt;
    pt.u = u;
    pt.lambda = lambda;
    pt.mass = mass;
    pt.l2_residual_norm = l2_residual(u, lambda, V, f).sup_norm();
    pt.constraint_violation = std::abs(u.mass() - mass);
    return pt;
}

Field limit_profile(const GridSpec& grid, double p, double vbar, double center)
{
    if (!(p > 2.0))
        throw PreconditionError("limit profile needs p > 2");
    if (!(vbar > 0.0))
        throw PreconditionError("limit profile needs a positive potential level");
    const double e = 1.0 / (p - 2.0);
    const double amp = std::pow(vbar, e);
    const double b = 0.5 * (p - 2.0) * std::sqrt(vbar);
    return Field::sample(grid, [&](double x) {
        const double s = 1.0 / std::cosh(b * (x - center));
        return amp * std::pow(0.5 * p * s * s, e);
    });
}

double limit_profile_mass(double p, double vbar)
{
    // ∫ sech^s(bx) dx = B(s/2, 1/2) / b
    const double e = 1.0 / (p - 2.0);
    const double s = 4.0 * e;
    const double b = 0.5 * (p - 2.0) * std::sqrt(vbar);
    return std::pow(vbar, 2.0 * e) * std::pow(0.5 * p, 2.0 * e) * std::beta(0.5 * s, 0.5) / b;
}

double limit_profile_vbar(double p, double mass)
{
    const double expo = 2.0 / (p - 2.0) - 0.5;
    if (std::abs(expo) < 1e-12)
        throw CriticalExponent("profile mass does not depend on the level at p = 6");
    return std::pow(mass / limit_profile_mass(p, 1.0), 1.0 / expo);
}

double lagrange_multiplier(const Field& u, const SampledPotential& V, const Nonlinearity& f)
{
    const double m = u.mass();
    if (m == 0.0)
        throw InvalidField("multiplier of the zero field is undefined");
    return inner_l2(l2_residual(u, 0.0, V, f), u) / m;
}

namespace {

Field to_mass(const Field& u, double alpha) { return std::sqrt(alpha / u.mass()) * u; }

} // namespace

ConstrainedCriticalPoint normalized_flow(const Field& u_init, double alpha, const SampledPotential& V,
                                         const Nonlinearity& f, const FlowOptions& opts)
{
    if (!(alpha > 0.0))
        throw PreconditionError("mass must be positive");
    if (u_init.mass() == 0.0)
        throw InvalidField("flow needs a nonzero initial field");
    Field u = to_mass(u_init, alpha);
    double e = energy(u, V, f);
    double gnorm = 0.0;
    for (int it = 0; it <= opts.max_iter; ++it) {
        const Field su = apply_s(u, V);
        const Field grad = u - apply_s(f.f(u), V);
        const double mu = inner_l2(grad, u) / inner_l2(su, u);
        const Field g = grad - mu * su;
        gnorm = norm_h1v(g, V);
        if (gnorm <= opts.tol) {
            ConstrainedCriticalPoint pt = make_point(u, lagrange_multiplier(u, V, f), alpha, V, f);
            pt.iterations = it;
            return pt;
        }
        double tau = opts.step;
        while (true) {
            Field trial = to_mass(u - tau * g, alpha);
            const double et = energy(trial, V, f);
            if (et <= e) {
                u = std::move(trial);
                e = et;
                break;
            }
            tau *= 0.5;
            if (tau < 1e-12 * opts.step)
                throw FlowStalled("flow step collapsed", gnorm);
        }
    }
    throw FlowStalled("normalized flow hit the iteration cap with gradient norm " + std::to_string(gnorm), gnorm);
}

ConstrainedCriticalPoint ground_state(const SampledPotential& V, const Nonlinearity& f, double alpha,
                                      const GroundStateOptions& opts)
{
    const Potential& pot = V.potential();
    double center = 0.0;
    if (opts.center) {
        center = *opts.center;
    } else if (pot.periodic()) {
        center = pot.argmin();
        if (center > 0.5 * pot.period())
            center -= pot.period();
    }
    // Profile of the constant-coefficient problem with the right mass, at the well bottom.
    double level = 1.0;
    if (std::abs(f.p() - Nonlinearity::mass_critical) > 1e-9 && f.coefficient() > 0.0)
        level = limit_profile_vbar(f.p(), alpha * std::pow(f.coefficient(), 2.0 / (f.p() - 2.0)));
    Field guess = limit_profile(V.grid(), f.p(), level, center);
    const ConstrainedCriticalPoint coarse = normalized_flow(guess, alpha, V, f, opts.flow);
    ConstrainedCriticalPoint fine = constrained_newton(coarse.u, coarse.lambda, alpha, V, f, opts.newton);
    fine.iterations += coarse.iterations;
    return fine;
}

} // namespace nlsw
