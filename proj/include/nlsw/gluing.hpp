#pragma once

#include "nlsw/grid.hpp"
#include "nlsw/model.hpp"
#include "nlsw/stationary.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace nlsw {

// Integer lattice offsets of the bumps.
class BumpConfig {
public:
    explicit BumpConfig(std::vector<long> offsets);
    // n offsets spaced d apart, centred on 0: floor((i - (n-1)/2) d).
    static BumpConfig evenly_spaced(int n, long d);

    int n() const { return static_cast<int>(offsets_.size()); }
    const std::vector<long>& offsets() const { return offsets_; }
    // min |a_i - a_j| over i != j; the largest long for a single bump.
    long separation() const;

private:
    std::vector<long> offsets_;
};

struct ExtendedPoint {
    Field u;
    double lambda = 0.0;
};

// An element of the product space H^1 x R.
struct ExtendedVector {
    Field field;
    double scalar = 0.0;
};

double extended_inner(const ExtendedVector& a, const ExtendedVector& b, const SampledPotential& V);
double extended_norm(const ExtendedVector& a, const SampledPotential& V);

// Sum of the copies of ubar shifted by offset * lattice.
Field superpose(const Field& ubar, const BumpConfig& cfg, double lattice = 1.0);

// (u - S f(u) - λ S u, -½(|u|² - α)), with λ shifted into the gauge of S.
ExtendedVector extended_gradient(const ExtendedPoint& pt, double alpha, const SampledPotential& V,
                                 const Nonlinearity& f);

// (v - S(f'(u) v) - λ S v - μ S u, -(u, v)_2)
ExtendedVector bordered_apply(const ExtendedPoint& pt, const SampledPotential& V, const Nonlinearity& f,
                              const Field& v, double mu);

struct NewtonTrace {
    std::vector<double> residuals; // extended-gradient norm before each step and at exit
    std::vector<int> halvings;
    int iterations = 0;
};

// Damped Newton on the extended gradient. Each step solves the symmetric
// indefinite bordered system [[L, -u], [-u^T, 0]] in one factorization.
ConstrainedCriticalPoint constrained_newton(const Field& u0, double lambda0, double alpha, const SampledPotential& V,
                                            const Nonlinearity& f, const NewtonOptions& opts = {},
                                            NewtonTrace* trace = nullptr,
                                            long separation = std::numeric_limits<long>::max());

struct GlueResult {
    ConstrainedCriticalPoint point;
    Field superposition;
    NewtonTrace trace;
    double initial_residual = 0.0;
    double distance = 0.0;     // ||u_a - v|| in the <.,.> norm
    double lambda_shift = 0.0; // |λ_a - λ̄|
    long separation = 0;
};

// Newton from (superpose(ubar), λ̄). ubar is resampled onto V's grid if needed;
// the lattice defaults to the potential's period.
GlueResult glue(const ConstrainedCriticalPoint& ubar, const BumpConfig& cfg, double alpha,
                const SampledPotential& V, const Nonlinearity& f, const NewtonOptions& opts = {},
                double lattice = 0.0);

// Smallest |σ| with K x = σ G x, where K is the bordered matrix and G the
// metric of H^1 x R: 1/σ_min is the norm of the inverse of the bordered Hessian.
struct SigmaEstimate {
    double sigma_min = 0.0;
    int iterations = 0;
    bool converged = false;
};
SigmaEstimate bordered_sigma_min(const ExtendedPoint& pt, const SampledPotential& V, const Nonlinearity& f,
                                 int max_iter = 50, double rel_tol = 1e-6);

struct ShadowingReport {
    double residual_norm = 0.0; // ||h(v0)||
    double sigma_min = 0.0;
    double inverse_norm = 0.0;  // 1/sigma_min
    double lipschitz = 0.0;     // sampled sup ||dh(y) - T|| over the ball
    double delta = 0.0;
    double q = 0.0;
    int samples = 0;
    bool sigma_converged = false;
    bool invertible = false;
    bool condition_ii = false;  // ||h(v0)|| < δ(1-q) σ_min
    bool condition_iii = false; // sampled Lipschitz <= q σ_min
    bool all_hold() const { return invertible && condition_ii && condition_iii; }
};

// Heuristic check of the contraction hypotheses at pt0; the Lipschitz bound
// is sampled on the sphere of radius delta, not certified.
ShadowingReport shadowing_certificate(const ExtendedPoint& pt0, double alpha, const SampledPotential& V,
                                      const Nonlinearity& f, double delta, double q, int samples = 8,
                                      std::uint64_t seed = 1);

// Smooth random element of H^1 x R with norm `radius`.
ExtendedVector random_direction(const GridSpec& grid, const SampledPotential& V, double radius, std::uint64_t seed);

} // namespace nlsw
