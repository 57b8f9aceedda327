#pragma once

#include "nlsw/grid.hpp"

#include <optional>
#include <vector>

namespace nlsw {

class Potential {
public:
    enum class Kind { constant, cosine, tabulated };

    static Potential constant(double c);
    // base + amplitude * cos(2πx / period)
    static Potential cosine(double amplitude, double base = 1.0, double period = 1.0);
    // Samples at x_j = j * period / n, j = 0..n-1, interpolated trigonometrically.
    static Potential tabulated(std::vector<double> samples, double period = 1.0);

    Kind kind() const { return kind_; }
    bool periodic() const { return kind_ != Kind::constant; }
    double period() const { return period_; }
    double base() const { return base_; }
    double amplitude() const { return amplitude_; }
    const std::vector<double>& samples() const { return samples_; }

    double operator()(double x) const;
    double derivative(double x, int order) const;
    double min() const;
    double max() const;
    // Location of the minimum within one period [0, period).
    double argmin() const;
    double argmax() const;

    // x -> V(eps x)
    Potential rescaled(double eps) const;

private:
    Potential() = default;
    void build_coefficients();

    Kind kind_ = Kind::constant;
    double base_ = 0.0;
    double amplitude_ = 0.0;
    double period_ = 1.0;
    std::vector<double> samples_;
    std::vector<double> cos_coef_, sin_coef_; // tabulated only
};

// A potential sampled on a grid, together with the bottom of the discrete
// spectrum of -Δ + V and the constant gauge shift c used wherever the positive
// operator -Δ + V + c is needed. Multipliers exchanged with callers are always
// in the unshifted gauge.
class SampledPotential {
public:
    // Without an explicit gauge, c = 0 when the spectrum bottom exceeds 0.05
    // and c = 1 - bottom otherwise.
    SampledPotential(const Potential& V, const GridSpec& grid, std::optional<double> gauge = std::nullopt);

    const Potential& potential() const { return potential_; }
    const GridSpec& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    double gauge() const { return gauge_; }
    double bottom() const { return bottom_; }
    // Bottom of the spectrum of the shifted operator.
    double gamma() const { return bottom_ + gauge_; }
    void require_positive() const;

private:
    Potential potential_;
    GridSpec grid_;
    Eigen::VectorXd values_;
    double bottom_ = 0.0;
    double gauge_ = 0.0;
};

// Smallest eigenvalue of the discrete periodic -Δ + V on the grid. Uses the
// one-period problem when the box holds a whole number of aligned periods.
double discrete_spectrum_bottom(const Potential& V, const GridSpec& grid);
double discrete_spectrum_bottom_full(const Potential& V, const GridSpec& grid);

} // namespace nlsw
