#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "nlsw/error.hpp"
#include "nlsw/grid.hpp"
#include "nlsw/potential.hpp"

#include <cmath>
#include <limits>

using namespace nlsw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Field random_field(const GridSpec& g, std::uint64_t seed) { return Field(g, oracle::random_smooth(g.L, g.M, seed)); }

} // namespace

TEST_CASE("grid spec validation")
{
    CHECK_THROWS_AS(GridSpec(0.0, 128), PreconditionError);
    CHECK_THROWS_AS(GridSpec(10.0, 63), PreconditionError);
    CHECK_THROWS_AS(GridSpec(10.0, 32), PreconditionError);
    GridSpec g(10.0, 200);
    CHECK(g.h() == 0.1);
    CHECK(g.points_in(1.0) == 10);
    CHECK(g.points_in(0.25) == -1);
}

TEST_CASE("field rejects wrong sizes and non-finite values")
{
    GridSpec g(4.0, 64);
    CHECK_THROWS_AS(Field(g, Eigen::VectorXd::Zero(63)), InvalidField);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(64);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Field(g, v), InvalidField);
    v[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Field(g, v), InvalidField);
    CHECK_THROWS_AS(Field::zero(g) + Field::zero(GridSpec(4.0, 128)), GridMismatch);
}

TEST_CASE("laplacian of simple functions")
{
    GridSpec g(10.0, 256);
    SECTION("constants are harmonic")
    {
        auto u = Field::sample(g, [](double) { return 3.7; });
        CHECK(laplacian_apply(u).sup_norm() < 1e-13);
    }
    SECTION("lowest cosine is an eigenfunction")
    {
        // roundoff grows like k_max^2, so a coarse grid
        GridSpec c(10.0, 64);
        const double k = M_PI / c.L;
        auto u = Field::sample(c, [k](double x) { return std::cos(k * x); });
        auto lu = laplacian_apply(u);
        CHECK((lu - (k * k) * u).sup_norm() < 1e-12 * k * k);
    }
    SECTION("sech on a large box")
    {
        GridSpec big(40.0, 4096);
        auto u = Field::sample(big, [](double x) { return oracle::sech(x); });
        auto expected = Field::sample(big, [](double x) { return -oracle::sech_second_derivative(x); });
        CHECK((laplacian_apply(u) - expected).sup_norm() < 1e-10);
    }
}

TEST_CASE("derivative of a trigonometric polynomial")
{
    GridSpec g(5.0, 128);
    const double k = 3.0 * M_PI / g.L;
    auto u = Field::sample(g, [k](double x) { return std::sin(k * x); });
    auto du = Field::sample(g, [k](double x) { return k * std::cos(k * x); });
    CHECK((derivative(u) - du).sup_norm() < 1e-12);
}

TEST_CASE("resolvent on closed-form right-hand sides")
{
    GridSpec g(40.0, 1024);
    SampledPotential V(Potential::constant(1.0), g);
    SECTION("constants")
    {
        auto z = resolvent_solve(Field::sample(g, [](double) { return 1.0; }), V, 0.0);
        CHECK((z - Field::sample(g, [](double) { return 1.0; })).sup_norm() < 1e-12);
    }
    SECTION("cosine eigenfunction")
    {
        const double k = M_PI / g.L;
        auto rhs = Field::sample(g, [k](double x) { return (1.0 + k * k) * std::cos(k * x); });
        auto z = resolvent_solve(rhs, V, 0.0);
        CHECK((z - Field::sample(g, [k](double x) { return std::cos(k * x); })).sup_norm() < 1e-11);
    }
    SECTION("soliton identity (-d^2 + 1) u0 = u0^3")
    {
        auto rhs = Field::sample(g, [](double x) { return std::pow(oracle::soliton(x), 3); });
        auto z = resolvent_solve(rhs, V, 0.0);
        auto u0 = Field::sample(g, oracle::soliton);
        CHECK((z - u0).sup_norm() < 1e-8);
    }
    SECTION("shift at the spectrum bottom is singular")
    {
        try {
            resolvent_solve(Field::zero(g), V, 1.0);
            FAIL("expected SingularOperator");
        } catch (const SingularOperator& e) {
            CHECK_THAT(e.gap(), WithinAbs(0.0, 1e-10));
        }
        CHECK_THROWS_AS(resolvent_solve(Field::zero(g), V, 1.5), SingularOperator);
    }
}

TEST_CASE("resolvent consistency and self-adjointness on random fields")
{
    const auto& V = fixture::periodic_potential();
    const auto& g = V.grid();
    for (int s = 0; s < 5; ++s) {
        const double shift = -0.5 + 0.3 * s;
        auto rhs = random_field(g, 100 + s);
        auto z = resolvent_solve(rhs, V, shift);
        Eigen::VectorXd back = laplacian_apply(z).values() + (V.values().array() - shift).matrix().cwiseProduct(z.values());
        CHECK(fixture::sup_diff(back, rhs.values()) < 1e-10 * std::max(1.0, rhs.sup_norm()));

        auto other = random_field(g, 200 + s);
        const double a = inner_l2(resolvent_solve(rhs, V, shift), other);
        const double b = inner_l2(rhs, resolvent_solve(other, V, shift));
        CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("L2 scalar product")
{
    GridSpec g(40.0, 2048);
    auto u0 = Field::sample(g, oracle::soliton);
    CHECK(inner_l2(Field::zero(g), u0) == 0.0);
    CHECK_THAT(inner_l2(u0, u0), WithinAbs(oracle::soliton_mass, 1e-10));
    const double k = M_PI / g.L;
    auto c = Field::sample(g, [k](double x) { return std::cos(k * x); });
    auto s = Field::sample(g, [k](double x) { return std::sin(k * x); });
    CHECK(std::abs(inner_l2(c, s)) < 1e-12);
    CHECK_THROWS_AS(inner_l2(u0, Field::zero(GridSpec(40.0, 1024))), GridMismatch);
}

TEST_CASE("H1 scalar product with the potential")
{
    SECTION("soliton with V = 1")
    {
        GridSpec g(40.0, 2048);
        SampledPotential V(Potential::constant(1.0), g);
        auto u0 = Field::sample(g, oracle::soliton);
        CHECK_THAT(inner_h1v(u0, u0, V), WithinAbs(oracle::soliton_grad2 + oracle::soliton_mass, 1e-10));
        CHECK_THAT(inner_h1(u0, u0), WithinAbs(oracle::soliton_grad2 + oracle::soliton_mass, 1e-10));
    }
    SECTION("form bound and exact symmetry on random fields")
    {
        const auto& V = fixture::periodic_potential();
        for (int s = 0; s < 20; ++s) {
            auto u = random_field(V.grid(), s + 1);
            auto v = random_field(V.grid(), s + 101);
            CHECK(inner_h1v(u, u, V) >= V.gamma() * u.mass() * (1.0 - 1e-12));
            CHECK(inner_h1v(u, v, V) == inner_h1v(v, u, V));
        }
    }
    SECTION("non-positive operator without a gauge")
    {
        GridSpec g(8.0, 128);
        SampledPotential V(Potential::constant(-1.0), g, 0.0);
        auto u = Field::sample(g, oracle::sech);
        CHECK_THROWS_AS(inner_h1v(u, u, V), AssumptionViolation);
        SampledPotential W(Potential::constant(-1.0), g);
        CHECK(W.gauge() > 0.0);
        CHECK(inner_h1v(u, u, W) > 0.0);
    }
}

TEST_CASE("translations")
{
    const auto& V = fixture::periodic_potential();
    const auto& g = V.grid();
    auto u = random_field(g, 7);
    auto v = random_field(g, 8);
    CHECK(translate(u, 0).values() == u.values());
    for (long a : {-5L, -1L, 1L, 3L, 12L}) {
        auto tu = translate(u, a), tv = translate(v, a);
        CHECK(translate(tu, -a).values() == u.values());
        CHECK_THAT(inner_l2(tu, tv), WithinRel(inner_l2(u, v), 1e-13));
        CHECK_THAT(inner_h1v(tu, tv, V), WithinRel(inner_h1v(u, v, V), 1e-12));
    }
    // u(x - 1) sampled directly
    auto s = Field::sample(g, [](double x) { return std::exp(-x * x); });
    auto s1 = Field::sample(g, [](double x) { return std::exp(-(x - 1) * (x - 1)); });
    CHECK(fixture::sup_diff(translate(s, 1).values(), s1.values()) < 1e-15);
    CHECK_THROWS_AS(translate(u, 1, 0.3), MisalignedTranslation);
    CHECK_THROWS_AS(translate(u, 60), PreconditionError);
}

TEST_CASE("resampling reproduces trigonometric polynomials")
{
    GridSpec coarse(6.0, 96), fine(6.0, 384);
    auto fn = [](double x) { return std::cos(M_PI * x / 6.0) + 0.3 * std::sin(5 * M_PI * x / 6.0); };
    auto u = Field::sample(coarse, fn);
    CHECK(fixture::sup_diff(resample(u, fine).values(), Field::sample(fine, fn).values()) < 1e-13);
    // a smaller box is a restriction
    GridSpec inner(3.0, 192);
    auto b = Field::sample(coarse, [](double x) { return std::exp(-x * x); });
    CHECK(fixture::sup_diff(resample(b, inner).values(), Field::sample(inner, [](double x) { return std::exp(-x * x); }).values()) <
          1e-12);
}

TEST_CASE("dense laplacian matches the spectral operator")
{
    GridSpec g(3.0, 64);
    auto u = random_field(g, 5);
    Eigen::MatrixXd D = laplacian_matrix(g);
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(fixture::sup_diff(D * u.values(), laplacian_apply(u).values()) < 1e-9);
}

TEST_CASE("spectrum bottom")
{
    SECTION("constant potential")
    {
        GridSpec g(10.0, 128);
        CHECK_THAT(SampledPotential(Potential::constant(2.5), g).bottom(), WithinAbs(2.5, 1e-10));
    }
    SECTION("cosine potential: band bounds, Hill matrix and full box agree")
    {
        const auto& V = fixture::periodic_potential();
        CHECK(V.bottom() > 0.5);
        CHECK(V.bottom() < 1.5);
        CHECK_THAT(V.bottom(), WithinAbs(oracle::hill_ground_energy(1.0, 0.5), 1e-10));
        GridSpec g(8.0, 256);
        CHECK_THAT(discrete_spectrum_bottom_full(Potential::cosine(0.5), g),
                   WithinAbs(discrete_spectrum_bottom(Potential::cosine(0.5), g), 1e-10));
    }
    SECTION("independent of the resolution once M >= 512")
    {
        const double a = discrete_spectrum_bottom(Potential::cosine(0.5), GridSpec(16.0, 512));
        const double b = discrete_spectrum_bottom(Potential::cosine(0.5), GridSpec(16.0, 1024));
        CHECK(std::abs(a - b) < 1e-8);
    }
}
