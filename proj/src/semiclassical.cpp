#include "nlsw/semiclassical.hpp"

#include "linalg.hpp"
#include "nlsw/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlsw {

namespace {

void require_normalized(const Potential& V)
{
    if (std::abs(V(0.0) - 1.0) > 1e-12)
        throw AssumptionViolation("rescaled problem expects V(0) = 1, got " + std::to_string(V(0.0)));
    if (std::abs(V.derivative(0.0, 1)) > 1e-9)
        throw AssumptionViolation("rescaled problem expects a critical point of V at 0");
}

double peak_location(const Field& u)
{
    Eigen::Index i = 0;
    u.values().maxCoeff(&i);
    const Eigen::Index n = u.size();
    const double a = u[(i - 1 + n) % n], b = u[i], c = u[(i + 1) % n];
    const double denom = a - 2.0 * b + c;
    const double off = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    return u.grid().x(i) + off * u.grid().h();
}

double sup_residual(const Field& u, const SampledPotential& V, const Nonlinearity& f)
{
    return l2_residual(u, 0.0, V, f).sup_norm();
}

} // namespace

FamilyMember rescaled_solve(double eps, const Potential& V, const Nonlinearity& f, const GridSpec& grid,
                            const Field* seed, const FreeNewtonOptions& opts)
{
    require_normalized(V);
    if (!(eps > 0.0))
        throw PreconditionError("ε must be positive");
    SampledPotential Ve(V.rescaled(eps), grid);
    Field u = seed ? resample(*seed, grid) : limit_profile(grid, f.p(), 1.0);
    const Eigen::MatrixXd lap = laplacian_matrix(grid);

    double res = sup_residual(u, Ve, f);
    int steps = 0;
    int increases = 0;
    while (res > opts.tol) {
        if (steps >= opts.max_iter)
            throw ContinuationNeeded("free Newton at ε = " + std::to_string(eps) + " stalled at residual " +
                                     std::to_string(res));
        Eigen::MatrixXd l = lap;
        for (int i = 0; i < grid.M; ++i)
            l(i, i) += Ve.values()[i] - f.fprime(u[i]);
        const linalg::SymmetricIndefinite fac(std::move(l));
        if (fac.singular())
            throw ContinuationNeeded("linearization is singular at ε = " + std::to_string(eps));
        const Field step(grid, fac.solve(-l2_residual(u, 0.0, Ve, f).values()));
        double t = 1.0;
        Field trial = u + step;
        double tres = sup_residual(trial, Ve, f);
        for (int k = 0; k < opts.max_halvings && !(tres < res); ++k) {
            t *= 0.5;
            trial = u + t * step;
            tres = sup_residual(trial, Ve, f);
        }
        increases = tres < res ? 0 : increases + 1;
        if (increases >= 3 || !std::isfinite(tres))
            throw ContinuationNeeded("free Newton diverges at ε = " + std::to_string(eps));
        u = std::move(trial);
        res = tres;
        ++steps;
    }
    const double mass = u.mass();
    ConstrainedCriticalPoint pt = make_point(u, 0.0, mass, Ve, f);
    pt.iterations = steps;
    return FamilyMember{eps, std::move(Ve), std::move(pt), eps * mass, peak_location(u), steps};
}

EpsilonFamily continue_family(const std::vector<double>& eps_list, const Potential& V, const Nonlinearity& f,
                              const GridSpec& grid, const FreeNewtonOptions& opts)
{
    if (eps_list.empty())
        throw PreconditionError("ε list is empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw PreconditionError("ε list must be strictly descending");
    EpsilonFamily fam{V, f, {}};
    for (double eps : eps_list) {
        const Field* seed = fam.members.empty() ? nullptr : &fam.members.back().point.u;
        fam.members.push_back(rescaled_solve(eps, V, f, grid, seed, opts));
    }
    return fam;
}

CriterionValue criterion_value(double p, const GridSpec& grid)
{
    if (std::abs(p - Nonlinearity::mass_critical) < 1e-12)
        throw CriticalExponent("the criterion degenerates at the mass-critical exponent p = 6");
    const Nonlinearity f(p);
    const Field u0 = limit_profile(grid, p, 1.0);
    const double h = grid.h();
    const double b = 0.5 * (p - 2.0);
    // closed-form translation mode: u_0' = -tanh(b x) u_0
    Eigen::VectorXd q(grid.M);
    for (int i = 0; i < grid.M; ++i)
        q[i] = -std::tanh(b * grid.x(i)) * u0[i];
    q /= std::sqrt(h * q.squaredNorm());

    Eigen::MatrixXd l = laplacian_matrix(grid);
    for (int i = 0; i < grid.M; ++i)
        l(i, i) += 1.0 - f.fprime(u0[i]);
    l.noalias() += h * q * q.transpose();
    const linalg::SymmetricIndefinite fac(l);
    Eigen::VectorXd z = fac.solve(u0.values());
    z += fac.solve(u0.values() - l * z);

    CriterionValue out;
    out.numeric = h * z.dot(u0.values());
    out.analytic = (0.25 - 1.0 / (p - 2.0)) * u0.mass();
    return out;
}

ZTable z_eps_check(const EpsilonFamily& family)
{
    if (family.members.empty())
        throw PreconditionError("family is empty");
    ZTable tab;
    const double p = family.f.p();
    tab.limit = criterion_value(p).numeric;
    const double expected_sign = p > Nonlinearity::mass_critical ? 1.0 : -1.0;
    for (const FamilyMember& mem : family.members) {
        ZRow row;
        row.eps = mem.eps;
        try {
            const Field z = z_vector(mem.point.u, 0.0, mem.potential, family.f);
            row.z_dot_u = inner_l2(z, mem.point.u);
            row.error = std::abs(row.z_dot_u - tab.limit);
            row.sign_ok = row.z_dot_u * expected_sign > 0.0;
        } catch (const NotFreelyNondegenerate&) {
            row.flagged = true;
        }
        tab.rows.push_back(row);
    }
    tab.monotone = true;
    for (std::size_t i = 1; i < tab.rows.size(); ++i)
        if (tab.rows[i].flagged || tab.rows[i - 1].flagged || !(tab.rows[i].error < tab.rows[i - 1].error))
            tab.monotone = false;
    return tab;
}

std::vector<RayleighRow> translation_mode_estimate(const EpsilonFamily& family)
{
    std::vector<RayleighRow> rows;
    const double p = family.f.p();
    const double b = 0.5 * (p - 2.0);
    const double v2 = family.V.derivative(0.0, 2);
    for (const FamilyMember& mem : family.members) {
        const GridSpec& g = mem.point.u.grid();
        const double xe = mem.peak_location;
        const Field u0 = limit_profile(g, p, 1.0, xe);
        const Field du0 = Field::sample(g, [&](double x) { return -std::tanh(b * (x - xe)); });
        const Field mode(g, du0.values().cwiseProduct(u0.values()));
        RayleighRow row;
        row.eps = mem.eps;
        row.rayleigh = hessian_form(mem.point.u, 0.0, mem.potential, family.f, mode, mode);
        row.predicted = 0.5 * mem.eps * mem.eps * v2 * u0.mass();
        row.ratio = row.predicted != 0.0 ? row.rayleigh / row.predicted : 0.0;
        const Field w = mem.point.u - u0;
        const Field lw = laplacian_apply(w);
        const double h2 = inner_l2(w, w) + 2.0 * inner_l2(lw, w) + inner_l2(lw, lw);
        row.h2_rate = std::sqrt(std::max(0.0, h2)) / (mem.eps * mem.eps);
        rows.push_back(row);
    }
    return rows;
}

int morse_index_of_potential(const Potential& V)
{
    const double v2 = V.derivative(0.0, 2);
    if (v2 == 0.0)
        throw AssumptionViolation("critical point of V at 0 is degenerate");
    return v2 < 0.0 ? 1 : 0;
}

std::vector<MorseRow> morse_check(const EpsilonFamily& family)
{
    const int mv = morse_index_of_potential(family.V);
    const bool super = family.f.p() > Nonlinearity::mass_critical;
    std::vector<MorseRow> rows;
    for (const FamilyMember& mem : family.members) {
        MorseRow row;
        row.eps = mem.eps;
        row.report = classify(mem.point, mem.potential, family.f);
        row.m = row.report.m;
        row.m_f = row.report.m_f;
        row.expected_m_f = mv + 1;
        row.expected_m = super ? mv + 1 : mv;
        row.flagged = !row.report.eigenvalues_near_zero.empty() || !row.report.constrained_near_zero.empty();
        rows.push_back(std::move(row));
    }
    return rows;
}

GridSpec lattice_grid(double eps, int periods, int points_per_period)
{
    if (periods < 1 || points_per_period < 2)
        throw PreconditionError("lattice grid needs at least one period and two points per period");
    return GridSpec(0.5 * periods / eps, periods * points_per_period);
}

MassSelection select_mass_epsilon(double alpha, int n, const EpsilonFamily& family,
                                  const std::function<GridSpec(double)>& grid_for, const FreeNewtonOptions& opts)
{
    if (!(alpha > 0.0) || n < 1)
        throw PreconditionError("need a positive mass and at least one bump");
    const auto& mem = family.members;
    if (mem.size() < 2)
        throw PreconditionError("mass selection needs at least two family members");
    for (std::size_t i = 1; i < mem.size(); ++i)
        if (!(mem[i].unrescaled_mass < mem[i - 1].unrescaled_mass))
            throw AssumptionViolation("mass curve of the family is not monotone in ε");
    const double target = alpha / n;
    const double lo = mem.back().unrescaled_mass, hi = mem.front().unrescaled_mass;
    if (target < lo || target > hi)
        throw RangeError("mass " + std::to_string(target) + " per bump is outside the family band [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]",
                         lo, hi);

    // bracket and interpolate linearly in ε
    std::size_t k = 1;
    while (k + 1 < mem.size() && mem[k].unrescaled_mass > target)
        ++k;
    const FamilyMember& a = mem[k - 1];
    const FamilyMember& b = mem[k];
    const double s = (target - b.unrescaled_mass) / (a.unrescaled_mass - b.unrescaled_mass);
    const double eps0 = b.eps + s * (a.eps - b.eps);
    const Field& seed = (s > 0.5 ? a : b).point.u;

    int solves = 0;
    auto solve = [&](double eps, const Field& from) {
        ++solves;
        return rescaled_solve(eps, family.V, family.f, grid_for(eps), &from, opts);
    };
    FamilyMember m0 = solve(eps0, seed);
    double e_prev = eps0, r_prev = m0.unrescaled_mass - target;
    double e_cur = eps0 * (1.0 + (r_prev > 0.0 ? -1e-3 : 1e-3));
    FamilyMember cur = solve(e_cur, m0.point.u);
    double r_cur = cur.unrescaled_mass - target;
    const double tol = 1e-10 * std::max(1.0, target);
    while (std::abs(r_cur) > tol) {
        if (solves > 24)
            throw SolverError("mass selection did not converge; last mismatch " + std::to_string(r_cur));
        const double e_next = e_cur - r_cur * (e_cur - e_prev) / (r_cur - r_prev);
        FamilyMember next = solve(e_next, cur.point.u);
        e_prev = e_cur;
        r_prev = r_cur;
        e_cur = e_next;
        r_cur = next.unrescaled_mass - target;
        cur = std::move(next);
    }
    return MassSelection{e_cur, std::move(cur), solves, std::abs(r_cur)};
}

} // namespace nlsw
