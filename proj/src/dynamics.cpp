#include "nlsw/dynamics.hpp"

#include "fft.hpp"
#include "nlsw/error.hpp"
#include "nlsw/potential.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace nlsw {

ComplexField::ComplexField(const GridSpec& grid, Eigen::VectorXcd values) : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.M)
        throw InvalidField("complex field size does not match its grid");
    if (!values_.allFinite())
        throw InvalidField("complex field has non-finite entries");
}

ComplexField ComplexField::from_real(const Field& u) { return ComplexField(u.grid(), u.values().cast<cplx>()); }

Field ComplexField::real() const { return Field(grid_, values_.real()); }
Field ComplexField::imag() const { return Field(grid_, values_.imag()); }

namespace {

Eigen::VectorXd wavenumbers(const GridSpec& g)
{
    Eigen::VectorXd k(g.M);
    const double dk = std::numbers::pi / g.L;
    for (int j = 0; j < g.M; ++j)
        k[j] = dk * (j <= g.M / 2 ? j : j - g.M);
    return k;
}

// plain product, skipping the inf/nan recovery of the library operator
fft::lcplx mul(fft::lcplx a, fft::lcplx b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// ∫|ψ'|² with the Nyquist mode counted as in laplacian_apply
double kinetic(const ComplexField& psi)
{
    const int n = psi.grid().M;
    Eigen::VectorXcd hat(n);
    fft::forward(psi.values().data(), hat.data(), n);
    const Eigen::VectorXd k = wavenumbers(psi.grid());
    return psi.grid().h() * (k.array().square() * hat.array().abs2()).sum() / n;
}

// Standard H^1 pairing Σ k² a conj(b) + h Σ a conj(b), as a complex number.
cplx h1_pairing(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const GridSpec& g)
{
    const int n = g.M;
    Eigen::VectorXcd ah(n), bh(n);
    fft::forward(a.data(), ah.data(), n);
    fft::forward(b.data(), bh.data(), n);
    const Eigen::VectorXd k = wavenumbers(g);
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j)
        acc += (1.0 + k[j] * k[j]) * ah[j] * std::conj(bh[j]);
    return g.h() * acc / static_cast<double>(n);
}

} // namespace

double energy(const ComplexField& psi, const SampledPotential& V, const Nonlinearity& f)
{
    if (!(psi.grid() == V.grid()))
        throw GridMismatch("field and potential live on different grids");
    const double h = psi.grid().h();
    const Eigen::VectorXd a = psi.values().cwiseAbs();
    double pot = 0.0, nl = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        pot += V.values()[i] * a[i] * a[i];
        nl += f.F(a[i]);
    }
    return 0.5 * (kinetic(psi) + h * pot) - h * nl;
}

double orbit_distance(const ComplexField& psi, const Field& phi)
{
    if (!(psi.grid() == phi.grid()))
        throw GridMismatch("field and reference live on different grids");
    const Eigen::VectorXcd p = phi.values().cast<cplx>();
    // ||ψ - φ e^{iθ}||² = |ψ|² + |φ|² - 2 Re(e^{-iθ} <ψ, φ>), minimal at θ = arg <ψ, φ>
    const cplx pair = h1_pairing(psi.values(), p, psi.grid());
    const double theta = std::arg(pair);
    const Eigen::VectorXcd diff = psi.values() - std::polar(1.0, theta) * p;
    return std::sqrt(std::max(0.0, h1_pairing(diff, diff, psi.grid()).real()));
}

TrajectoryRecord propagate(const ComplexField& psi0, const SampledPotential& V, const Nonlinearity& f,
                           const PropagateOptions& opts, const Field* reference)
{
    if (!(opts.dt > 0.0) || !(opts.t_end >= 0.0))
        throw PreconditionError("time step must be positive and the end time nonnegative");
    if (opts.dt > opts.dt_cap)
        throw PreconditionError("time step " + std::to_string(opts.dt) + " exceeds the cap " +
                                std::to_string(opts.dt_cap));
    if (!(psi0.grid() == V.grid()))
        throw GridMismatch("initial field and potential live on different grids");
    if (opts.record_stride < 1)
        throw PreconditionError("record stride must be at least 1");

    const GridSpec& g = psi0.grid();
    const int n = g.M;
    const long steps = std::lround(opts.t_end / opts.dt);
    const Eigen::VectorXd k = wavenumbers(g);
    // The stepping runs in long double: with double FFTs the mass creeps up
    // by about 1e-16 per step, which breaks conservation over 1e5 steps.
    using lcplx = fft::lcplx;
    std::vector<lcplx> half(n), full(n);
    for (int j = 0; j < n; ++j) {
        const long double theta = static_cast<long double>(k[j]) * k[j] * opts.dt * 0.5L;
        half[j] = {std::cos(theta) / n, std::sin(theta) / n};
        full[j] = {std::cos(2.0L * theta) / n, std::sin(2.0L * theta) / n};
    }

    TrajectoryRecord rec;
    Eigen::VectorXcd psi = psi0.values();
    std::vector<lcplx> work(n), hat(n);
    const double m0 = psi0.mass();
    auto record = [&](double t) {
        const ComplexField cur(g, psi);
        const double mass = cur.mass();
        if (std::abs(mass - m0) > opts.mass_tolerance * m0)
            throw IntegratorFault("mass drifted from " + std::to_string(m0) + " to " + std::to_string(mass) +
                                  " at t = " + std::to_string(t));
        rec.times.push_back(t);
        rec.mass.push_back(mass);
        rec.energy.push_back(energy(cur, V, f));
        if (reference)
            rec.orbit_distance.push_back(orbit_distance(cur, *reference));
    };
    record(0.0);
    if (opts.snapshot_stride > 0) {
        rec.snapshots.emplace_back(g, psi);
        rec.snapshot_times.push_back(0.0);
    }

    auto linear = [&](const std::vector<lcplx>& factor) {
        fft::forward(work.data(), hat.data(), n);
        for (int j = 0; j < n; ++j)
            hat[j] = mul(hat[j], factor[j]);
        fft::backward(hat.data(), work.data(), n);
    };
    for (int i = 0; i < n; ++i)
        work[i] = psi[i];
    // closing and opening half steps of consecutive unobserved steps merge
    bool open = false;
    for (long s = 1; s <= steps; ++s) {
        linear(open ? full : half);
        for (int i = 0; i < n; ++i) {
            const double re = static_cast<double>(work[i].real()), im = static_cast<double>(work[i].imag());
            const double phase = (V.values()[i] - f.ratio(std::sqrt(re * re + im * im))) * opts.dt;
            const long double c = std::cos(phase), sn = std::sin(phase);
            // pull the double rounded rotation back to unit modulus
            const long double fix = 1.5L - 0.5L * (c * c + sn * sn);
            work[i] = mul(work[i], lcplx(c * fix, sn * fix));
        }
        const bool rec_step = s % opts.record_stride == 0 || s == steps;
        const bool snap_step = opts.snapshot_stride > 0 && s % opts.snapshot_stride == 0;
        open = !(rec_step || snap_step);
        if (!open) {
            linear(half);
            for (int i = 0; i < n; ++i)
                psi[i] = cplx(static_cast<double>(work[i].real()), static_cast<double>(work[i].imag()));
        }
        const double t = static_cast<double>(s) * opts.dt;
        if (rec_step) {
            record(t);
            if (reference && opts.stop_distance && rec.orbit_distance.back() > *opts.stop_distance)
                break;
        }
        if (snap_step) {
            rec.snapshots.emplace_back(g, psi);
            rec.snapshot_times.push_back(t);
        }
    }
    return rec;
}

ComplexField seed_perturbation(const Field& phi, const Field& direction, double amplitude)
{
    const Field u = phi + amplitude * direction;
    return ComplexField::from_real(std::sqrt(phi.mass() / u.mass()) * u);
}

double growth_rate_fit(const TrajectoryRecord& traj, double t0, double t1)
{
    if (traj.orbit_distance.size() != traj.times.size())
        throw FitRejected("trajectory has no orbit-distance trace");
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < t0 || t > t1)
            continue;
        const double d = traj.orbit_distance[i];
        if (!(d >= 1e-6 && d <= 1e-1))
            throw FitRejected("orbit distance " + std::to_string(d) + " at t = " + std::to_string(t) +
                              " is outside the linear regime");
        const double y = std::log(d);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
    }
    if (count < 3)
        throw FitRejected("fit window holds fewer than three samples");
    const double denom = count * stt - st * st;
    return (count * sty - st * sy) / denom;
}

std::pair<double, double> growth_window(const TrajectoryRecord& traj, double lo, double hi)
{
    double t0 = -1.0, t1 = -1.0;
    for (std::size_t i = 0; i < traj.times.size() && i < traj.orbit_distance.size(); ++i) {
        const double d = traj.orbit_distance[i];
        if (t0 < 0.0 && d >= lo)
            t0 = traj.times[i];
        if (t0 >= 0.0 && d >= hi) {
            t1 = traj.times[i - 1];
            break;
        }
    }
    if (t0 < 0.0 || t1 <= t0)
        throw FitRejected("orbit distance never climbs from " + std::to_string(lo) + " to " + std::to_string(hi));
    return {t0, t1};
}

} // namespace nlsw
