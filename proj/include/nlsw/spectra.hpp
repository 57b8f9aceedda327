#pragma once

#include "nlsw/gluing.hpp"
#include "nlsw/grid.hpp"
#include "nlsw/model.hpp"
#include "nlsw/stationary.hpp"

#include <string>
#include <vector>

namespace nlsw {

enum class Classification { fully_nondegenerate_neg, fully_nondegenerate_pos, degenerate };
std::string to_string(Classification c);

struct SpectralOptions {
    // Zero threshold relative to the spectral radius estimate of L.
    double tau_rel = 1e-6;
};

// Eigenvalue count below -tau0, with the eigenvalues that were computed.
struct IndexCount {
    int count = 0;
    std::vector<double> near_zero; // eigenvalues in [-tau0, tau0]
    Eigen::VectorXd eigenvalues;   // ascending, up to the first one above tau0
    double gap = 0.0;              // smallest |eigenvalue|
    bool provisional() const { return !near_zero.empty(); }
};

struct SpectralReport {
    int m = 0;
    int m_f = 0;
    double z_dot_u = 0.0;
    double spectral_gap = 0.0;
    Classification classification = Classification::degenerate;
    std::vector<double> eigenvalues_near_zero;     // free operator
    std::vector<double> constrained_near_zero;     // operator on the tangent space
    std::vector<double> free_eigenvalues;          // lowest part of the spectrum of L
    std::vector<double> constrained_eigenvalues;
    double tau0 = 0.0;
    double form_on_u = 0.0;   // (L u, u)_2, negative at any nontrivial critical point
    bool sign_definite = false;
    // m_f - m in {0, 1} and, when classified, the sign rule for (m, m_f) holds.
    bool consistent = false;
};

// L = -Δ + V - λ - f'(u) as a dense symmetric matrix.
Eigen::MatrixXd linearized_matrix(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f);

// tau_rel * ((π/h)^2 + max |V - λ - f'(u)|)
double zero_threshold(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f,
                      double tau_rel = 1e-6);

IndexCount free_morse_index(const Eigen::MatrixXd& L, double tau0);
// Count on {v : (v, u)_2 = 0}, via a Householder basis of that complement.
IndexCount constrained_morse_index(const Eigen::MatrixXd& L, const Field& u, double tau0);

// Solves L z = u. Throws NotFreelyNondegenerate when the smallest |eigenvalue| of L
// is at most tau0 (a negative tau0 selects the default threshold).
Field z_vector(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f, double tau0 = -1.0);

SpectralReport classify(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f,
                        const SpectralOptions& opts = {});
inline SpectralReport classify(const ConstrainedCriticalPoint& pt, const SampledPotential& V, const Nonlinearity& f,
                               const SpectralOptions& opts = {})
{
    return classify(pt.u, pt.lambda, V, f, opts);
}

struct ZTranslateCheck {
    double field_discrepancy = 0.0;  // max_i || T_{-a_i} z_{u_a} - z_ubar ||_{L2(window)}
    double scalar_discrepancy = 0.0; // |(u_a, z_{u_a}) - n (ubar, z_ubar)|
    double scalar_relative = 0.0;
};

// Compares the z vector of a glued point, translated back to each bump, with
// that of the single bump, on a window of `window` decay lengths either side.
ZTranslateCheck z_translate_check(const ConstrainedCriticalPoint& ubar, const SampledPotential& V_ubar,
                                  const ConstrainedCriticalPoint& glued, const SampledPotential& V,
                                  const Nonlinearity& f, const BumpConfig& cfg, double window = 5.0,
                                  double lattice = 0.0);

struct InstabilityResult {
    double rho = 0.0;
    double mu = 0.0;
    double beta = 0.0;
    Field v;          // unit L2 norm, orthogonal to phi
    Field w_first;    // eigenvector (v, -ρ L2^+ v + β/ρ φ) of [[0, -L2], [L1, 0]]
    Field w_second;
    double block_residual = 0.0;   // relative sup-norm residual of the eigen-equation
    double l2_phi_residual = 0.0;  // sup |L2 φ|
    double orthogonality = 0.0;    // |(v, φ)_2|
};

// Smallest μ of L1 v = μ L2^{-1} v on the complement of φ, and the growing mode
// with rate ρ = sqrt(-μ). Throws NoInstabilityDetected when μ >= -tau0.
InstabilityResult instability_eigenvalue(const ConstrainedCriticalPoint& phi, const SampledPotential& V,
                                         const Nonlinearity& f, double tau_rel = 1e-6);

// Smallest eigenvalue of the discrete periodic -Δ + V.
inline double spectrum_bottom(const SampledPotential& V) { return V.bottom(); }

} // namespace nlsw
