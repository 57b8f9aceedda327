#include "nlsw/model.hpp"

#include "nlsw/error.hpp"

#include <cmath>
#include <string>

namespace nlsw {

Nonlinearity::Nonlinearity(double p, double coefficient) : p_(p), coefficient_(coefficient)
{
    if (!(p > 2.0) || !std::isfinite(p))
        throw PreconditionError("nonlinearity exponent must exceed 2, got " + std::to_string(p));
    if (!std::isfinite(coefficient))
        throw PreconditionError("nonlinearity coefficient must be finite");
}

Field Nonlinearity::f(const Field& u) const
{
    return Field(u.grid(), u.values().unaryExpr([this](double s) { return f(s); }));
}

Field Nonlinearity::fprime(const Field& u) const
{
    return Field(u.grid(), u.values().unaryExpr([this](double s) { return fprime(s); }));
}

Field Nonlinearity::ratio(const Field& u) const
{
    return Field(u.grid(), u.values().unaryExpr([this](double s) { return ratio(s); }));
}

namespace {

void require_on(const Field& u, const SampledPotential& V)
{
    if (!(u.grid() == V.grid()))
        throw GridMismatch("field and potential live on different grids");
}

double potential_integral(const Field& u, const Nonlinearity& f)
{
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        acc += f.F(u[i]);
    return u.grid().h() * acc;
}

} // namespace

double energy(const Field& u, const SampledPotential& V, const Nonlinearity& f)
{
    require_on(u, V);
    return 0.5 * inner_h1v(u, u, V) - potential_integral(u, f);
}

double energy_unshifted(const Field& u, const SampledPotential& V, const Nonlinearity& f)
{
    require_on(u, V);
    const double h = u.grid().h();
    const double kinetic = inner_l2(laplacian_apply(u), u);
    const double pot = h * (V.values().array() * u.values().array().square()).sum();
    return 0.5 * (kinetic + pot) - potential_integral(u, f);
}

Field l2_residual(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f)
{
    require_on(u, V);
    Eigen::VectorXd r = laplacian_apply(u).values();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        r[i] += (V.values()[i] - lambda) * u[i] - f.f(u[i]);
    return Field(u.grid(), std::move(r));
}

Field h1_gradient(const Field& u, const SampledPotential& V, const Nonlinearity& f)
{
    require_on(u, V);
    return u - apply_s(f.f(u), V);
}

double hessian_form(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f,
                    const Field& v, const Field& w)
{
    require_on(u, V);
    require_same_grid(u, v);
    require_same_grid(u, w);
    // the gauge cancels: <v,w> carries +c, the multiplier term carries -c
    double local = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        local += (-lambda - V.gauge() - f.fprime(u[i])) * (v[i] * w[i]);
    return inner_h1v(v, w, V) + u.grid().h() * local;
}

} // namespace nlsw
