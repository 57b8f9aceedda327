#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include "nlsw/dynamics.hpp"
#include "nlsw/error.hpp"
#include "nlsw/gluing.hpp"
#include "nlsw/spectra.hpp"
#include "nlsw/stationary.hpp"

#include <cmath>

using namespace nlsw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_of(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, x);
    return m;
}

} // namespace

TEST_CASE("standing wave is an exact orbit up to splitting error")
{
    GridSpec g(20.0, 256);
    SampledPotential V(Potential::constant(1.0), g);
    Nonlinearity f(4.0);
    const double vbar = 1.5, lambda = 1.0 - vbar;
    auto phi = limit_profile(g, 4.0, vbar);
    REQUIRE(l2_residual(phi, lambda, V, f).sup_norm() < 1e-8);

    PropagateOptions po;
    po.dt = 1e-4;
    po.t_end = 20.0;
    po.record_stride = 2000;
    po.snapshot_stride = 40000;
    auto traj = propagate(ComplexField::from_real(phi), V, f, po, &phi);
    CHECK(max_of(traj.orbit_distance) < 1e-6);
    REQUIRE(traj.snapshots.size() >= 5);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const double t = traj.snapshot_times[k];
        Eigen::VectorXcd expected = phi.values().cast<cplx>() * std::exp(cplx(0.0, lambda * t));
        CHECK((traj.snapshots[k].values() - expected).cwiseAbs().maxCoeff() < 1e-6);
    }
    for (std::size_t i = 1; i < traj.times.size(); ++i)
        REQUIRE(traj.times[i] > traj.times[i - 1]);
    for (double m : traj.mass)
        CHECK_THAT(m, WithinRel(traj.mass.front(), 1e-12));
}

TEST_CASE("linear plane wave evolves by its phase")
{
    GridSpec g(10.0, 128);
    SampledPotential V(Potential::constant(1.0), g);
    Nonlinearity lin(4.0, 0.0);
    const double k = 3.0 * M_PI / g.L;
    Eigen::VectorXcd psi(g.M);
    for (int i = 0; i < g.M; ++i)
        psi[i] = std::exp(cplx(0.0, k * g.x(i)));
    PropagateOptions po;
    po.dt = 1e-2;
    po.t_end = 1.0;
    po.snapshot_stride = 100;
    auto traj = propagate(ComplexField(g, psi), V, lin, po);
    REQUIRE(!traj.snapshots.empty());
    const double t = traj.snapshot_times.back();
    CHECK_THAT(t, WithinAbs(1.0, 1e-12));
    Eigen::VectorXcd expected = psi * std::exp(cplx(0.0, (k * k + 1.0) * t));
    CHECK((traj.snapshots.back().values() - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("energy error is second order in the time step")
{
    GridSpec g(20.0, 256);
    SampledPotential V(Potential::constant(1.0), g);
    Nonlinearity f(4.0);
    auto phi = limit_profile(g, 4.0);
    auto dir = Field::sample(g, [](double x) { return x * std::exp(-x * x); });
    auto psi0 = seed_perturbation(phi, dir, 0.2);
    auto drift = [&](double dt) {
        PropagateOptions po;
        po.dt = dt;
        po.t_end = 1.0;
        po.record_stride = static_cast<int>(std::lround(0.1 / dt));
        auto traj = propagate(psi0, V, f, po);
        double d = 0.0;
        for (double e : traj.energy)
            d = std::max(d, std::abs(e - traj.energy.front()));
        return d;
    };
    const double d1 = drift(0.02), d2 = drift(0.01);
    CHECK(d1 / d2 > 3.0);
    CHECK(d1 / d2 < 5.0);
}

TEST_CASE("orbit distance")
{
    GridSpec g(20.0, 512);
    auto phi = limit_profile(g, 4.0);
    for (double theta : {0.0, 0.7, 2.5, -3.0}) {
        ComplexField psi(g, phi.values().cast<cplx>() * std::exp(cplx(0.0, theta)));
        CHECK(orbit_distance(psi, phi) < 1e-12);
    }
    // an H1-orthogonal real perturbation
    auto w0 = Field::sample(g, [](double x) { return x * std::exp(-x * x); });
    const double delta = 1e-3;
    ComplexField psi(g, (phi + delta * w0).values().cast<cplx>());
    CHECK_THAT(orbit_distance(psi, phi), WithinRel(delta * norm_h1(w0), 1e-9));
    ComplexField rotated(g, psi.values() * std::exp(cplx(0.0, 1.3)));
    CHECK_THAT(orbit_distance(rotated, phi), WithinRel(orbit_distance(psi, phi), 1e-9));
}

TEST_CASE("growth rate fit on a synthetic trace")
{
    TrajectoryRecord tr;
    for (int i = 0; i <= 100; ++i) {
        const double t = 0.05 * i;
        tr.times.push_back(t);
        tr.orbit_distance.push_back(1e-5 * std::exp(2.0 * t));
    }
    CHECK_THAT(growth_rate_fit(tr, 0.5, 2.5), WithinRel(2.0, 1e-10));
    auto w = growth_window(tr, 1e-4, 1e-2);
    CHECK(w.first >= std::log(10.0) / 2.0);
    CHECK(w.second <= std::log(1000.0) / 2.0);
    CHECK_THROWS_AS(growth_rate_fit(tr, 4.0, 5.0), FitRejected);
    CHECK_THROWS_AS(growth_rate_fit(tr, 0.0, 0.01), FitRejected);
}

TEST_CASE("supercritical soliton departs at the linear rate")
{
    GridSpec g(40.0, 1280);
    SampledPotential V(Potential::constant(1.0), g);
    Nonlinearity f(8.0);
    auto u = limit_profile(g, 8.0);
    auto phi = make_point(u, 0.0, u.mass(), V, f);
    auto ins = instability_eigenvalue(phi, V, f);
    auto dir = (1.0 / norm_h1(ins.v)) * ins.v;

    PropagateOptions po;
    po.dt = 4e-4;
    po.t_end = 40.0;
    po.record_stride = 25;
    po.stop_distance = 0.05;
    auto traj = propagate(seed_perturbation(phi.u, dir, 1e-5), V, f, po, &phi.u);
    double exit = -1.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (exit < 0 && traj.orbit_distance[i] > 1e-2)
            exit = traj.times[i];
    CHECK(exit > 0.0);
    CHECK(exit < 40.0);
    auto w = growth_window(traj, 1e-4, 1e-2);
    const double rate = growth_rate_fit(traj, w.first, w.second);
    CHECK(std::abs(rate - ins.rho) < 0.15 * ins.rho);

    SECTION("departure from the unperturbed run is linear in the seed")
    {
        // the unperturbed run drifts by its own splitting error, so compare against it
        PropagateOptions early;
        early.dt = 4e-4;
        early.t_end = 1.0;
        early.snapshot_stride = 2500;
        auto at = [&](double amp) {
            return propagate(seed_perturbation(phi.u, dir, amp), V, f, early).snapshots.back().values();
        };
        const Eigen::VectorXcd base = at(0.0);
        const double da = (at(1e-4) - base).norm(), db = (at(2e-4) - base).norm();
        CHECK_THAT(db / da, WithinRel(2.0, 1e-2));
    }
}

TEST_CASE("subcritical soliton stays close to its orbit")
{
    GridSpec g(40.0, 1280);
    SampledPotential V(Potential::constant(1.0), g);
    Nonlinearity f(4.0);
    auto phi = limit_profile(g, 4.0);
    auto rd = random_direction(g, V, 1.0, 3).field;
    PropagateOptions po;
    po.dt = 2e-3;
    po.t_end = 50.0;
    po.record_stride = 250;
    auto traj = propagate(seed_perturbation(phi, (1.0 / norm_h1(rd)) * rd, 1e-5), V, f, po, &phi);
    CHECK(max_of(traj.orbit_distance) < 1e-3);
}

TEST_CASE("propagation preconditions")
{
    GridSpec g(10.0, 128);
    SampledPotential V(Potential::constant(1.0), g);
    auto psi = ComplexField::from_real(limit_profile(g, 4.0));
    PropagateOptions po;
    po.dt = 0.5;
    CHECK_THROWS_AS(propagate(psi, V, Nonlinearity(4.0), po), PreconditionError);
    po.dt = -1e-3;
    CHECK_THROWS_AS(propagate(psi, V, Nonlinearity(4.0), po), PreconditionError);
    Eigen::VectorXcd bad = psi.values();
    bad[0] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(ComplexField(g, bad), InvalidField);
}
