#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "nlsw/error.hpp"
#include "nlsw/gluing.hpp"
#include "nlsw/spectra.hpp"

#include <cmath>

using namespace nlsw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Soliton {
    GridSpec grid{20.0, 512};
    SampledPotential V{Potential::constant(1.0), grid};
    Nonlinearity f{4.0};
    Field u = limit_profile(grid, 4.0);
};

const Soliton& soliton()
{
    static const Soliton s;
    return s;
}

} // namespace

TEST_CASE("linearized operator of the cubic soliton")
{
    const auto& s = soliton();
    Eigen::MatrixXd L = linearized_matrix(s.u, 0.0, s.V, s.f);
    CHECK((L - L.transpose()).cwiseAbs().maxCoeff() < 1e-10 * L.cwiseAbs().maxCoeff());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    const auto levels = oracle::poschl_teller_levels(2);
    CHECK_THAT(es.eigenvalues()[0], WithinAbs(1.0 + levels[0], 1e-6));
    CHECK_THAT(es.eigenvalues()[1], WithinAbs(1.0 + levels[1], 1e-6));

    const double tau0 = zero_threshold(s.u, 0.0, s.V, s.f);
    auto idx = free_morse_index(L, tau0);
    CHECK(idx.count == 1);
    REQUIRE(idx.near_zero.size() == 1);
    CHECK(idx.provisional());
    CHECK_THROWS_AS(z_vector(s.u, 0.0, s.V, s.f), NotFreelyNondegenerate);

    for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd v = oracle::random_smooth(s.grid.L, s.grid.M, 40 + k);
        const double q = s.grid.h() * v.dot(L * v);
        CHECK(std::abs(q - hessian_form(s.u, 0.0, s.V, s.f, Field(s.grid, v), Field(s.grid, v))) < 1e-9 * std::max(1.0, std::abs(q)));
    }
}

TEST_CASE("linear problem")
{
    const auto& V = fixture::periodic_potential();
    Nonlinearity lin(4.0, 0.0);
    auto u = Field::sample(V.grid(), [](double x) { return std::exp(-x * x); });
    const double lambda = V.bottom() - 0.4;
    Eigen::MatrixXd L = linearized_matrix(u, lambda, V, lin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    CHECK_THAT(es.eigenvalues()[0], WithinAbs(0.4, 1e-10));
    CHECK(free_morse_index(L, zero_threshold(u, lambda, V, lin)).count == 0);

    auto z = z_vector(u, lambda, V, lin);
    CHECK(inner_l2(z, u) > 0.0);
    CHECK((z - resolvent_solve(u, V, lambda)).sup_norm() < 1e-9);
}

TEST_CASE("classification of the periodic ground state")
{
    const auto& V = fixture::periodic_potential();
    const auto& f = fixture::cubic();
    const auto& pt = fixture::periodic_ground_state();
    auto rep = classify(pt, V, f);
    CHECK(rep.m == 0);
    CHECK(rep.m_f == 1);
    CHECK(rep.z_dot_u < 0.0);
    CHECK(rep.classification == Classification::fully_nondegenerate_neg);
    CHECK(rep.sign_definite);
    CHECK(rep.consistent);
    CHECK(rep.form_on_u < 0.0);
    CHECK(rep.spectral_gap > rep.tau0);
    CHECK(rep.eigenvalues_near_zero.empty());

    auto z = z_vector(pt.u, pt.lambda, V, f);
    Eigen::MatrixXd L = linearized_matrix(pt.u, pt.lambda, V, f);
    CHECK(fixture::sup_diff(L * z.values(), pt.u.values()) < 1e-10 * std::max(1.0, z.sup_norm()));
    CHECK_THAT(inner_l2(z, pt.u), WithinRel(rep.z_dot_u, 1e-12));
    CHECK(constrained_morse_index(L, pt.u, rep.tau0).count == 0);
}

TEST_CASE("index formulas for glued states")
{
    const auto& V = fixture::periodic_potential();
    const auto& f = fixture::cubic();
    const auto& ubar = fixture::periodic_ground_state();
    const auto base = classify(ubar, V, f);
    for (int n : {2, 3}) {
        auto r = glue(ubar, BumpConfig::evenly_spaced(n, 16), n * ubar.mass, V, f);
        auto rep = classify(r.point, V, f);
        CHECK(rep.m_f == n * base.m_f);
        CHECK(rep.m == n * (base.m + 1) - 1);
        CHECK(rep.classification == Classification::fully_nondegenerate_neg);
        CHECK(rep.consistent);
        CHECK(rep.m_f - rep.m >= 0);
        CHECK(rep.m_f - rep.m <= 1);
    }
}

TEST_CASE("z vectors of glued states translate back to the single bump")
{
    const auto& V = fixture::periodic_potential();
    const auto& f = fixture::cubic();
    const auto& ubar = fixture::periodic_ground_state();

    auto single = z_translate_check(ubar, V, ubar, V, f, BumpConfig({0}));
    CHECK(single.field_discrepancy < 1e-8);
    CHECK(single.scalar_relative < 1e-10);

    double prev_field = 1e300, prev_scalar = 1e300;
    for (long d : {8L, 16L}) {
        auto cfg = BumpConfig::evenly_spaced(2, d);
        auto r = glue(ubar, cfg, 2 * ubar.mass, V, f);
        auto zc = z_translate_check(ubar, V, r.point, V, f, cfg);
        CHECK(zc.field_discrepancy < prev_field);
        CHECK(zc.scalar_discrepancy < prev_scalar);
        prev_field = zc.field_discrepancy;
        prev_scalar = zc.scalar_discrepancy;
        if (d == 16)
            CHECK(zc.scalar_relative < 0.05);
    }
}

TEST_CASE("instability eigenvalue")
{
    GridSpec g(40.0, 1280);
    SampledPotential V(Potential::constant(1.0), g);
    SECTION("supercritical soliton is unstable")
    {
        Nonlinearity f(8.0);
        auto u = limit_profile(g, 8.0);
        auto phi = make_point(u, 0.0, u.mass(), V, f);
        REQUIRE(classify(phi, V, f).m >= 1);
        auto res = instability_eigenvalue(phi, V, f);
        CHECK(res.rho > 0.0);
        CHECK(res.mu < 0.0);
        CHECK_THAT(res.rho, WithinAbs(std::sqrt(-res.mu), 1e-12));
        CHECK(res.orthogonality < 1e-10);
        CHECK(res.block_residual < 1e-8);
        CHECK(res.l2_phi_residual < 1e-6);
        CHECK_THAT(res.v.mass(), WithinRel(1.0, 1e-10));

        auto neg = make_point(-1.0 * u, 0.0, u.mass(), V, f);
        CHECK_THROWS_AS(instability_eigenvalue(neg, V, f), AssumptionViolation);
    }
    SECTION("subcritical soliton has no growing mode")
    {
        Nonlinearity f(4.0);
        auto u = limit_profile(g, 4.0);
        auto phi = make_point(u, 0.0, u.mass(), V, f);
        try {
            instability_eigenvalue(phi, V, f);
            FAIL("expected NoInstabilityDetected");
        } catch (const NoInstabilityDetected& e) {
            CHECK(e.mu() > -1e-6);
        }
    }
}

TEST_CASE("spectrum bottom")
{
    GridSpec g(12.0, 384);
    CHECK_THAT(spectrum_bottom(SampledPotential(Potential::constant(0.7), g)), WithinAbs(0.7, 1e-10));
    const double b = spectrum_bottom(SampledPotential(Potential::cosine(0.5), g));
    CHECK(b > 0.5);
    CHECK(b < 1.5);
}
