#pragma once

#include "nlsw/grid.hpp"
#include "nlsw/potential.hpp"

namespace nlsw {

// f(s) = coefficient * |s|^{p-2} s. A zero coefficient gives the linear problem.
class Nonlinearity {
public:
    explicit Nonlinearity(double p, double coefficient = 1.0);

    double p() const { return p_; }
    double coefficient() const { return coefficient_; }

    double f(double s) const { return coefficient_ * std::pow(std::abs(s), p_ - 2.0) * s; }
    double F(double s) const { return coefficient_ * std::pow(std::abs(s), p_) / p_; }
    double fprime(double s) const { return coefficient_ * (p_ - 1.0) * std::pow(std::abs(s), p_ - 2.0); }
    // f(s)/s, extended by 0 at s = 0
    double ratio(double s) const { return coefficient_ * std::pow(std::abs(s), p_ - 2.0); }

    Field f(const Field& u) const;
    Field fprime(const Field& u) const;
    Field ratio(const Field& u) const;

    // 2 + 4/N in one dimension
    static constexpr double mass_critical = 6.0;

private:
    double p_;
    double coefficient_;
};

// ½<u,u> - ∫F(u), with <.,.> the shifted scalar product (inner_h1v).
double energy(const Field& u, const SampledPotential& V, const Nonlinearity& f);
// The same functional with the unshifted potential.
double energy_unshifted(const Field& u, const SampledPotential& V, const Nonlinearity& f);

// -u'' + V u - f(u) - λ u
Field l2_residual(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f);

// Gradient of the energy in the <.,.> metric: u - S f(u).
Field h1_gradient(const Field& u, const SampledPotential& V, const Nonlinearity& f);

// ∫ v'w' + (V - λ - f'(u)) v w
double hessian_form(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f,
                    const Field& v, const Field& w);

} // namespace nlsw
