#include "nlsw/potential.hpp"

#include "linalg.hpp"
#include "nlsw/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nlsw {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int scan_points = 4096;
} // namespace

Potential Potential::constant(double c)
{
    if (!std::isfinite(c))
        throw PreconditionError("potential constant must be finite");
    Potential V;
    V.kind_ = Kind::constant;
    V.base_ = c;
    return V;
}

Potential Potential::cosine(double amplitude, double base, double period)
{
    if (!std::isfinite(amplitude) || !std::isfinite(base))
        throw PreconditionError("potential coefficients must be finite");
    if (!(period > 0.0 && std::isfinite(period)))
        throw PreconditionError("potential period must be positive");
    Potential V;
    V.kind_ = Kind::cosine;
    V.base_ = base;
    V.amplitude_ = amplitude;
    V.period_ = period;
    return V;
}

Potential Potential::tabulated(std::vector<double> samples, double period)
{
    if (samples.size() < 2)
        throw PreconditionError("tabulated potential needs at least two samples");
    for (double s : samples)
        if (!std::isfinite(s))
            throw PreconditionError("tabulated potential has non-finite samples");
    if (!(period > 0.0 && std::isfinite(period)))
        throw PreconditionError("potential period must be positive");
    Potential V;
    V.kind_ = Kind::tabulated;
    V.samples_ = std::move(samples);
    V.period_ = period;
    V.build_coefficients();
    return V;
}

void Potential::build_coefficients()
{
    const int n = static_cast<int>(samples_.size());
    const int kmax = n / 2;
    cos_coef_.assign(kmax + 1, 0.0);
    sin_coef_.assign(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        double c = 0.0, s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double t = two_pi * k * j / n;
            c += samples_[j] * std::cos(t);
            s += samples_[j] * std::sin(t);
        }
        const bool edge = k == 0 || (n % 2 == 0 && k == kmax);
        cos_coef_[k] = (edge ? 1.0 : 2.0) * c / n;
        sin_coef_[k] = (edge ? 0.0 : 2.0) * s / n;
    }
}

double Potential::operator()(double x) const { return derivative(x, 0); }

double Potential::derivative(double x, int order) const
{
    switch (kind_) {
    case Kind::constant:
        return order == 0 ? base_ : 0.0;
    case Kind::cosine: {
        const double w = two_pi / period_;
        const double t = w * x;
        const double wk = std::pow(w, order);
        double trig = 0.0;
        switch (order % 4) {
        case 0: trig = std::cos(t); break;
        case 1: trig = -std::sin(t); break;
        case 2: trig = -std::cos(t); break;
        default: trig = std::sin(t); break;
        }
        return (order == 0 ? base_ : 0.0) + amplitude_ * wk * trig;
    }
    case Kind::tabulated: {
        const double w = two_pi / period_;
        double acc = 0.0;
        for (std::size_t k = 0; k < cos_coef_.size(); ++k) {
            const double t = w * static_cast<double>(k) * x;
            const double wk = std::pow(w * static_cast<double>(k), order);
            // d^order/dx^order of a cos(t) + b sin(t)
            const double phase = order * std::numbers::pi / 2.0;
            acc += wk * (cos_coef_[k] * std::cos(t + phase) + sin_coef_[k] * std::sin(t + phase));
        }
        return acc;
    }
    }
    return 0.0;
}

double Potential::min() const
{
    if (kind_ == Kind::constant)
        return base_;
    if (kind_ == Kind::cosine)
        return base_ - std::abs(amplitude_);
    return (*this)(argmin());
}

double Potential::max() const
{
    if (kind_ == Kind::constant)
        return base_;
    if (kind_ == Kind::cosine)
        return base_ + std::abs(amplitude_);
    return (*this)(argmax());
}

double Potential::argmin() const
{
    if (kind_ == Kind::constant)
        return 0.0;
    if (kind_ == Kind::cosine)
        return amplitude_ >= 0.0 ? 0.5 * period_ : 0.0;
    double best = 0.0, val = (*this)(0.0);
    for (int i = 1; i < scan_points; ++i) {
        const double x = period_ * i / scan_points;
        const double v = (*this)(x);
        if (v < val) {
            val = v;
            best = x;
        }
    }
    return best;
}

double Potential::argmax() const
{
    if (kind_ == Kind::constant)
        return 0.0;
    if (kind_ == Kind::cosine)
        return amplitude_ >= 0.0 ? 0.0 : 0.5 * period_;
    double best = 0.0, val = (*this)(0.0);
    for (int i = 1; i < scan_points; ++i) {
        const double x = period_ * i / scan_points;
        const double v = (*this)(x);
        if (v > val) {
            val = v;
            best = x;
        }
    }
    return best;
}

Potential Potential::rescaled(double eps) const
{
    if (!(eps > 0.0))
        throw PreconditionError("rescaling factor must be positive");
    Potential V = *this;
    V.period_ = period_ / eps;
    return V;
}

SampledPotential::SampledPotential(const Potential& V, const GridSpec& grid, std::optional<double> gauge)
    : potential_(V), grid_(grid)
{
    values_.resize(grid.M);
    const long per = V.periodic() ? grid.points_in(V.period()) : -1;
    if (V.kind() == Potential::Kind::tabulated && per == static_cast<long>(V.samples().size()) &&
        grid.points_in(2.0 * grid.L) % per == 0) {
        // grid samples coincide with the table; avoid interpolation roundoff
        const long start = grid.points_in(grid.L);
        for (int i = 0; i < grid.M; ++i) {
            const long j = ((static_cast<long>(i) - start) % per + per) % per;
            values_[i] = V.samples()[static_cast<std::size_t>(j)];
        }
    } else {
        for (int i = 0; i < grid.M; ++i)
            values_[i] = V(grid.x(i));
    }
    bottom_ = discrete_spectrum_bottom(V, grid);
    gauge_ = gauge ? *gauge : (bottom_ > 0.05 ? 0.0 : 1.0 - bottom_);
}

void SampledPotential::require_positive() const
{
    if (!(gamma() > 0.0))
        throw AssumptionViolation("-Δ + V + c is not positive: bottom " + std::to_string(bottom_) + ", gauge " +
                                  std::to_string(gauge_));
}

double discrete_spectrum_bottom_full(const Potential& V, const GridSpec& grid)
{
    Eigen::MatrixXd a = laplacian_matrix(grid);
    for (int i = 0; i < grid.M; ++i)
        a(i, i) += V(grid.x(i));
    return linalg::lowest_eigenpairs(a, 1, false).values[0];
}

double discrete_spectrum_bottom(const Potential& V, const GridSpec& grid)
{
    if (!V.periodic())
        return V.base();
    const long per = grid.points_in(V.period());
    const long box = grid.M;
    if (per <= 0 || box % per != 0)
        return discrete_spectrum_bottom_full(V, grid);
    // The box operator commutes with a shift by one period. Its lowest
    // eigenvector is the periodic one, so one period with periodic ends suffices.
    const int n = static_cast<int>(per);
    Eigen::MatrixXd a = periodic_laplacian_matrix(n, V.period());
    for (int i = 0; i < n; ++i)
        a(i, i) += V(grid.x(i));
    return linalg::lowest_eigenpairs(a, 1, false).values[0];
}

} // namespace nlsw
