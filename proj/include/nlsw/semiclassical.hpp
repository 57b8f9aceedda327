#pragma once

#include "nlsw/grid.hpp"
#include "nlsw/model.hpp"
#include "nlsw/spectra.hpp"
#include "nlsw/stationary.hpp"

#include <functional>
#include <vector>

namespace nlsw {

// Everything here works in the rescaled frame y = x/ε, where the single peak
// solves -u'' + V(εy) u = |u|^{p-2} u. Masses of the unscaled peak are ε times
// the rescaled ones; multipliers are the same in both frames.

struct FreeNewtonOptions {
    double tol = 1e-10; // sup norm of the residual
    int max_iter = 20;
    int max_halvings = 6;
};

struct FamilyMember {
    double eps = 0.0;
    SampledPotential potential;       // V(ε·) on the member's grid
    ConstrainedCriticalPoint point;   // λ = 0, mass = rescaled |u_ε|²
    double unrescaled_mass = 0.0;
    double peak_location = 0.0;       // x_ε
    int newton_steps = 0;
};

struct EpsilonFamily {
    Potential V;
    Nonlinearity f;
    std::vector<FamilyMember> members;
};

// Free Newton solve at fixed ε. Seeds default to limit_profile(p, 1).
FamilyMember rescaled_solve(double eps, const Potential& V, const Nonlinearity& f, const GridSpec& grid,
                            const Field* seed = nullptr, const FreeNewtonOptions& opts = {});

// Solves along a descending list of ε, each solution seeding the next.
EpsilonFamily continue_family(const std::vector<double>& eps_list, const Potential& V, const Nonlinearity& f,
                              const GridSpec& grid, const FreeNewtonOptions& opts = {});

struct CriterionValue {
    double numeric = 0.0;  // (z_*, u_0)_2
    double analytic = 0.0; // (1/4 - 1/(p-2)) |u_0|_2^2
    double relative_error() const { return std::abs(numeric - analytic) / std::abs(analytic); }
};

// z_* solves (-Δ + 1 - (p-1) u_0^{p-2}) z = u_0 on the complement of the
// translation mode u_0'; the mode is removed by adding its rank-one projector.
CriterionValue criterion_value(double p, const GridSpec& grid = GridSpec(20.0, 640));

struct ZRow {
    double eps = 0.0;
    double z_dot_u = 0.0;
    double error = 0.0;      // |z_dot_u - limit|
    bool sign_ok = false;    // sign(z_dot_u) == sign(p - 6)
    bool flagged = false;    // operator singular within the zero threshold
};
struct ZTable {
    double limit = 0.0;
    std::vector<ZRow> rows;
    bool monotone = false;   // error decreases along the family
};
ZTable z_eps_check(const EpsilonFamily& family);

struct RayleighRow {
    double eps = 0.0;
    double rayleigh = 0.0;   // (L_ε u_0', u_0')_2 with u_0 centred at x_ε
    double predicted = 0.0;  // ½ ε² V''(0) |u_0|_2^2
    double ratio = 0.0;
    double h2_rate = 0.0;    // ||u_ε - u_0(· - x_ε)||_{H^2} / ε²
};
std::vector<RayleighRow> translation_mode_estimate(const EpsilonFamily& family);

struct MorseRow {
    double eps = 0.0;
    int m = 0;
    int m_f = 0;
    int expected_m = 0;
    int expected_m_f = 0;
    bool flagged = false; // near-zero eigenvalue, count not trusted
    bool ok() const { return m == expected_m && m_f == expected_m_f; }
    SpectralReport report;
};
// m_V counts negative eigenvalues of V''(0): 0 at a minimum, 1 at a maximum.
int morse_index_of_potential(const Potential& V);
std::vector<MorseRow> morse_check(const EpsilonFamily& family);

// Box of `periods` lattice cells of length 1/ε with `points_per_period` points each.
GridSpec lattice_grid(double eps, int periods, int points_per_period);

struct MassSelection {
    double eps = 0.0;
    FamilyMember member;
    int solves = 0;
    double mass_error = 0.0; // |unrescaled mass - α/n|
};

// Finds ε_n with unrescaled mass α/n: interpolation of the family's mass curve,
// then secant steps with Newton re-solves on grid_for(ε).
MassSelection select_mass_epsilon(double alpha, int n, const EpsilonFamily& family,
                                  const std::function<GridSpec(double)>& grid_for,
                                  const FreeNewtonOptions& opts = {});

} // namespace nlsw
