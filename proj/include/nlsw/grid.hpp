#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace nlsw {

class SampledPotential;

// Periodic box [-L, L) with M equally spaced points.
struct GridSpec {
    double L = 0.0;
    int M = 0;

    GridSpec() = default;
    GridSpec(double half_width, int points);

    double h() const { return 2.0 * L / M; }
    double x(Eigen::Index i) const { return -L + static_cast<double>(i) * h(); }
    // Number of grid points spanned by `length`, or -1 when it is not a whole number.
    long points_in(double length) const;
    // Largest wavenumber on the grid (the Nyquist mode).
    double k_max() const;

    bool operator==(const GridSpec& o) const { return L == o.L && M == o.M; }
};

// Real grid function. Values are fixed at construction.
class Field {
public:
    Field() = default;
    Field(const GridSpec& grid, Eigen::VectorXd values);

    static Field zero(const GridSpec& grid) { return Field(grid, Eigen::VectorXd::Zero(grid.M)); }
    template <class Fn>
    static Field sample(const GridSpec& grid, Fn&& fn)
    {
        Eigen::VectorXd v(grid.M);
        for (int i = 0; i < grid.M; ++i)
            v[i] = fn(grid.x(i));
        return Field(grid, std::move(v));
    }

    const GridSpec& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double operator[](Eigen::Index i) const { return values_[i]; }

    // h * sum u_i^2
    double mass() const;
    double sup_norm() const { return values_.cwiseAbs().maxCoeff(); }
    double min() const { return values_.minCoeff(); }
    double max() const { return values_.maxCoeff(); }

private:
    GridSpec grid_;
    Eigen::VectorXd values_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator-(const Field& a);
Field operator*(double s, const Field& a);
inline Field operator*(const Field& a, double s) { return s * a; }

void require_same_grid(const Field& a, const Field& b);

// -u'' by spectral differentiation (Nyquist mode kept as a cosine).
Field laplacian_apply(const Field& u);
// u' by spectral differentiation (Nyquist mode dropped).
Field derivative(const Field& u);

// Solves (-Δ + V - shift) z = g. The shift must lie below the bottom of the
// discrete spectrum of -Δ + V; the raw potential is used, the gauge is not added.
Field resolvent_solve(const Field& g, const SampledPotential& V, double shift);
// S = (-Δ + V + c)^{-1} with c the gauge shift of V.
Field apply_s(const Field& g, const SampledPotential& V);

double inner_l2(const Field& u, const Field& v);
// ∫ u'v' + (V + c) u v, the scalar product induced by -Δ + V in the shifted gauge.
double inner_h1v(const Field& u, const Field& v, const SampledPotential& V);
// ∫ u'v' + u v
double inner_h1(const Field& u, const Field& v);
double norm_h1v(const Field& u, const SampledPotential& V);
double norm_h1(const Field& u);

// u(x - a*period). a*period must be a whole number of grid points.
Field translate(const Field& u, long a, double period = 1.0);
// Cyclic shift by k grid points: result[i] = u[i - k].
Field shift_points(const Field& u, long k);

// Evaluates the trigonometric interpolant of u on another grid; points of the
// target box that fall outside u's box get zero.
Field resample(const Field& u, const GridSpec& target);

// Dense matrix of laplacian_apply on the grid.
Eigen::MatrixXd laplacian_matrix(const GridSpec& grid);
// Dense matrix of -d^2/dx^2 on n periodic points over a period of given length.
Eigen::MatrixXd periodic_laplacian_matrix(int n, double length);

} // namespace nlsw
