#pragma once

#include "nlsw/grid.hpp"
#include "nlsw/model.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace nlsw {

using cplx = std::complex<double>;

class ComplexField {
public:
    ComplexField() = default;
    ComplexField(const GridSpec& grid, Eigen::VectorXcd values);
    static ComplexField from_real(const Field& u);

    const GridSpec& grid() const { return grid_; }
    const Eigen::VectorXcd& values() const { return values_; }
    double mass() const { return grid_.h() * values_.squaredNorm(); }
    Field real() const;
    Field imag() const;

private:
    GridSpec grid_;
    Eigen::VectorXcd values_;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<double> orbit_distance; // empty without a reference wave
    std::vector<ComplexField> snapshots;
    std::vector<double> snapshot_times;
};

struct PropagateOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int record_stride = 1;   // steps between trace entries
    int snapshot_stride = 0; // steps between snapshots, 0 for none
    double dt_cap = 0.1;
    double mass_tolerance = 1e-10;
    // Stop early once the orbit distance exceeds this (when a reference is given).
    std::optional<double> stop_distance;
};

// Energy ½∫|ψ'|² + V|ψ|² - ∫F(|ψ|) with the unshifted potential.
double energy(const ComplexField& psi, const SampledPotential& V, const Nonlinearity& f);

// inf over θ of ||ψ - φ e^{iθ}|| in the standard H^1 norm.
double orbit_distance(const ComplexField& psi, const Field& phi);

// Strang splitting for -i ψ_t = -ψ'' + V ψ - f(ψ); a reference wave adds the
// orbit-distance trace.
TrajectoryRecord propagate(const ComplexField& psi0, const SampledPotential& V, const Nonlinearity& f,
                           const PropagateOptions& opts, const Field* reference = nullptr);

// φ + amplitude·v, rescaled back to the mass of φ.
ComplexField seed_perturbation(const Field& phi, const Field& direction, double amplitude);

// Least-squares slope of log(orbit distance) over t in [t0, t1].
double growth_rate_fit(const TrajectoryRecord& traj, double t0, double t1);

// The time window in which the orbit distance first climbs from lo to hi.
std::pair<double, double> growth_window(const TrajectoryRecord& traj, double lo, double hi);

} // namespace nlsw
