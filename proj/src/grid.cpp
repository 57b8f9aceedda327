#include "nlsw/grid.hpp"

#include "fft.hpp"
#include "nlsw/error.hpp"
#include "nlsw/potential.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace nlsw {

using fft::cplx;

GridSpec::GridSpec(double half_width, int points) : L(half_width), M(points)
{
    if (!(std::isfinite(L) && L > 0.0))
        throw PreconditionError("grid half width must be positive");
    if (M < 64 || M % 2 != 0)
        throw PreconditionError("grid point count must be even and at least 64, got " + std::to_string(M));
}

long GridSpec::points_in(double length) const
{
    const double r = length / h();
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r)))
        return -1;
    return static_cast<long>(k);
}

double GridSpec::k_max() const { return std::numbers::pi / h(); }

Field::Field(const GridSpec& grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.M)
        throw InvalidField("field has " + std::to_string(values_.size()) + " values on a grid of " +
                           std::to_string(grid_.M) + " points");
    if (!values_.allFinite())
        throw InvalidField("field has non-finite entries");
}

double Field::mass() const { return grid_.h() * values_.squaredNorm(); }

void require_same_grid(const Field& a, const Field& b)
{
    if (!(a.grid() == b.grid()))
        throw GridMismatch("fields live on different grids");
}

Field operator+(const Field& a, const Field& b)
{
    require_same_grid(a, b);
    return Field(a.grid(), a.values() + b.values());
}

Field operator-(const Field& a, const Field& b)
{
    require_same_grid(a, b);
    return Field(a.grid(), a.values() - b.values());
}

Field operator-(const Field& a) { return Field(a.grid(), -a.values()); }

Field operator*(double s, const Field& a) { return Field(a.grid(), s * a.values()); }

namespace {

// Multiplies the half spectrum by symbol(k) for k = 2π j / (2L).
template <class Symbol>
Field spectral_multiply(const Field& u, Symbol symbol)
{
    const GridSpec& g = u.grid();
    const int n = g.M;
    std::vector<cplx> hat(n / 2 + 1);
    fft::r2c(u.values().data(), hat.data(), n);
    const double dk = std::numbers::pi / g.L;
    for (int j = 0; j <= n / 2; ++j)
        hat[j] *= symbol(j, dk * j) / static_cast<double>(n);
    Eigen::VectorXd out(n);
    fft::c2r(hat.data(), out.data(), n);
    return Field(g, std::move(out));
}

double sup(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

} // namespace

Field laplacian_apply(const Field& u)
{
    return spectral_multiply(u, [](int, double k) { return cplx(k * k, 0.0); });
}

Field derivative(const Field& u)
{
    const int nyq = u.grid().M / 2;
    return spectral_multiply(u, [nyq](int j, double k) { return j == nyq ? cplx(0.0) : cplx(0.0, k); });
}

Field resolvent_solve(const Field& g, const SampledPotential& V, double shift)
{
    if (!(g.grid() == V.grid()))
        throw GridMismatch("right-hand side and potential live on different grids");
    const double gap = V.bottom() - shift;
    if (!(gap > 0.0))
        throw SingularOperator("shift " + std::to_string(shift) + " is not below the spectrum bottom " +
                                   std::to_string(V.bottom()),
                               gap);

    const GridSpec& grid = g.grid();
    const Eigen::VectorXd w = V.values().array() - shift;
    const double mean = w.mean();
    const double scale = grid.k_max() * grid.k_max() + w.cwiseAbs().maxCoeff();

    auto apply = [&](const Eigen::VectorXd& z) {
        Field f(grid, z);
        return Eigen::VectorXd(laplacian_apply(f).values() + w.cwiseProduct(z));
    };
    auto precondition = [&](const Eigen::VectorXd& r) {
        return spectral_multiply(Field(grid, r), [mean](int, double k) { return cplx(1.0 / (k * k + mean)); })
            .values();
    };

    const double gnorm = sup(g.values());
    if (gnorm == 0.0)
        return Field::zero(grid);

    // Preconditioned conjugate gradients; exact in one step when V is constant.
    Eigen::VectorXd z = precondition(g.values());
    Eigen::VectorXd r = g.values() - apply(z);
    Eigen::VectorXd s = precondition(r);
    Eigen::VectorXd d = s;
    double rs = r.dot(s);
    double best = sup(r);
    int since_best = 0;
    for (int it = 0; it < 2000; ++it) {
        const double floor = 32.0 * std::numeric_limits<double>::epsilon() * scale * sup(z);
        const double rn = sup(r);
        if (rn <= std::max(1e-12 * std::max(1.0, gnorm), floor))
            break;
        if (rn < 0.5 * best) {
            best = rn;
            since_best = 0;
        } else if (++since_best > 50) {
            if (rn <= 1e-9 * gnorm)
                break;
            throw SolverError("resolvent iteration stagnated at residual " + std::to_string(rn));
        }
        const Eigen::VectorXd ad = apply(d);
        const double alpha = rs / d.dot(ad);
        z += alpha * d;
        if ((it + 1) % 25 == 0)
            r = g.values() - apply(z);
        else
            r -= alpha * ad;
        s = precondition(r);
        const double rs_new = r.dot(s);
        d = s + (rs_new / rs) * d;
        rs = rs_new;
    }
    return Field(grid, std::move(z));
}

Field apply_s(const Field& g, const SampledPotential& V)
{
    V.require_positive();
    return resolvent_solve(g, V, -V.gauge());
}

double inner_l2(const Field& u, const Field& v)
{
    require_same_grid(u, v);
    return u.grid().h() * u.values().dot(v.values());
}

namespace {

// Σ k^2 Re(û conj v̂) weighted so that it equals h Σ u'_i v'_i for band-limited
// data, with the Nyquist term counted as for laplacian_apply. Written as
// ar*br + ai*bi so the result is exactly symmetric in u and v.
double gradient_pairing(const Field& u, const Field& v)
{
    const GridSpec& g = u.grid();
    const int n = g.M;
    std::vector<cplx> a(n / 2 + 1), b(n / 2 + 1);
    fft::r2c(u.values().data(), a.data(), n);
    fft::r2c(v.values().data(), b.data(), n);
    const double dk = std::numbers::pi / g.L;
    double acc = 0.0;
    for (int j = 0; j <= n / 2; ++j) {
        const double k = dk * j;
        const double weight = (j == 0 || j == n / 2) ? 1.0 : 2.0;
        acc += weight * k * k * (a[j].real() * b[j].real() + a[j].imag() * b[j].imag());
    }
    return g.h() * acc / n;
}

} // namespace

double inner_h1v(const Field& u, const Field& v, const SampledPotential& V)
{
    require_same_grid(u, v);
    if (!(u.grid() == V.grid()))
        throw GridMismatch("fields and potential live on different grids");
    V.require_positive();
    const double h = u.grid().h();
    double pot = 0.0;
    const Eigen::VectorXd& w = V.values();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        pot += (w[i] + V.gauge()) * (u[i] * v[i]);
    return gradient_pairing(u, v) + h * pot;
}

double inner_h1(const Field& u, const Field& v)
{
    require_same_grid(u, v);
    return gradient_pairing(u, v) + inner_l2(u, v);
}

double norm_h1v(const Field& u, const SampledPotential& V) { return std::sqrt(inner_h1v(u, u, V)); }

double norm_h1(const Field& u) { return std::sqrt(inner_h1(u, u)); }

Field shift_points(const Field& u, long k)
{
    const long n = u.grid().M;
    k %= n;
    if (k < 0)
        k += n;
    Eigen::VectorXd out(n);
    out.tail(n - k) = u.values().head(n - k);
    out.head(k) = u.values().tail(k);
    return Field(u.grid(), std::move(out));
}

Field translate(const Field& u, long a, double period)
{
    const GridSpec& g = u.grid();
    const double length = static_cast<double>(a) * period;
    if (std::abs(length) >= 2.0 * g.L)
        throw PreconditionError("translation by " + std::to_string(length) + " exceeds the box");
    const long k = g.points_in(length);
    if (k == -1 && length != 0.0)
        throw MisalignedTranslation("translation by " + std::to_string(length) +
                                    " is not a whole number of grid steps");
    return shift_points(u, length == 0.0 ? 0 : k);
}

Field resample(const Field& u, const GridSpec& target)
{
    const GridSpec& g = u.grid();
    if (g == target)
        return u;
    const int n = g.M;
    std::vector<cplx> hat(n / 2 + 1);
    fft::r2c(u.values().data(), hat.data(), n);
    const double dk = std::numbers::pi / g.L;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(target.M);
    for (int i = 0; i < target.M; ++i) {
        const double x = target.x(i);
        if (x < -g.L || x >= g.L)
            continue;
        const double t = x + g.L;
        double acc = hat[0].real();
        for (int j = 1; j < n / 2; ++j) {
            const cplx e = std::polar(1.0, dk * j * t);
            acc += 2.0 * (hat[j] * e).real();
        }
        acc += hat[n / 2].real() * std::cos(dk * (n / 2) * t);
        out[i] = acc / n;
    }
    return Field(target, std::move(out));
}

Eigen::MatrixXd periodic_laplacian_matrix(int n, double length)
{
    std::vector<cplx> symbol(n / 2 + 1);
    const double dk = 2.0 * std::numbers::pi / length;
    for (int j = 0; j <= n / 2; ++j)
        symbol[j] = cplx((dk * j) * (dk * j) / n, 0.0);
    Eigen::VectorXd col(n);
    fft::c2r(symbol.data(), col.data(), n);
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            a(i, j) = col[((i - j) % n + n) % n];
    // symmetrize away roundoff in the circulant column
    return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd laplacian_matrix(const GridSpec& grid) { return periodic_laplacian_matrix(grid.M, 2.0 * grid.L); }

} // namespace nlsw
