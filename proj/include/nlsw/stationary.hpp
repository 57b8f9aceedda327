#pragma once

#include "nlsw/grid.hpp"
#include "nlsw/model.hpp"

#include <optional>

namespace nlsw {

struct ConstrainedCriticalPoint {
    Field u;
    double lambda = 0.0;              // unshifted gauge
    double mass = 0.0;                // target value of |u|_2^2
    double l2_residual_norm = 0.0;    // sup norm of l2_residual(u, lambda)
    double constraint_violation = 0.0; // | |u|_2^2 - mass |
    int iterations = 0;
};

// Fills in the residual diagnostics for (u, lambda) on the sphere of the given mass.
ConstrainedCriticalPoint make_point(const Field& u, double lambda, double mass, const SampledPotential& V,
                                    const Nonlinearity& f);

// Positive even solution of -u'' + vbar u = u^{p-1}, centered at `center`.
Field limit_profile(const GridSpec& grid, double p, double vbar = 1.0, double center = 0.0);
// |u|_2^2 of that profile on the whole line.
double limit_profile_mass(double p, double vbar = 1.0);
// The vbar whose profile has the given mass (p != 6).
double limit_profile_vbar(double p, double mass);

// (-u'' + V u - f(u), u)_2 / |u|_2^2
double lagrange_multiplier(const Field& u, const SampledPotential& V, const Nonlinearity& f);

struct FlowOptions {
    double step = 0.5;
    double tol = 1e-6;
    int max_iter = 20000;
};

// Projected gradient descent of the energy in the <.,.> metric, renormalized to
// mass alpha after every step. Stops when the projected gradient norm is <= tol.
ConstrainedCriticalPoint normalized_flow(const Field& u_init, double alpha, const SampledPotential& V,
                                         const Nonlinearity& f, const FlowOptions& opts = {});

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 30;
    int max_halvings = 6;
    int max_increases = 3;
    double rcond_floor = 1e-10;
    // Refuse to start when the initial extended-gradient norm is above this.
    double max_initial_residual = 1e300;
};

struct GroundStateOptions {
    FlowOptions flow;
    NewtonOptions newton;
    std::optional<double> center; // defaults to the minimum of V closest to 0
};

// Flow from a mass-matched limit profile at a minimum of V, then constrained Newton.
ConstrainedCriticalPoint ground_state(const SampledPotential& V, const Nonlinearity& f, double alpha,
                                      const GroundStateOptions& opts = {});

} // namespace nlsw
