#include "nlsw/spectra.hpp"

#include "linalg.hpp"
#include "nlsw/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nlsw {

std::string to_string(Classification c)
{
    switch (c) {
    case Classification::fully_nondegenerate_neg: return "fully_nondegenerate_neg";
    case Classification::fully_nondegenerate_pos: return "fully_nondegenerate_pos";
    case Classification::degenerate: return "degenerate";
    }
    return "degenerate";
}

Eigen::MatrixXd linearized_matrix(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f)
{
    if (!(u.grid() == V.grid()))
        throw GridMismatch("field and potential live on different grids");
    Eigen::MatrixXd l = laplacian_matrix(u.grid());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        l(i, i) += V.values()[i] - lambda - f.fprime(u[i]);
    return l;
}

double zero_threshold(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f, double tau_rel)
{
    double local = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        local = std::max(local, std::abs(V.values()[i] - lambda - f.fprime(u[i])));
    const double k = u.grid().k_max();
    return tau_rel * (k * k + local);
}

namespace {

IndexCount count_below(const Eigen::MatrixXd& a, double tau0)
{
    IndexCount c;
    c.eigenvalues = linalg::eigenvalues_through(a, tau0);
    c.gap = std::numeric_limits<double>::infinity();
    for (double e : c.eigenvalues) {
        if (e < -tau0)
            ++c.count;
        else if (e <= tau0)
            c.near_zero.push_back(e);
        c.gap = std::min(c.gap, std::abs(e));
    }
    return c;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

} // namespace

IndexCount free_morse_index(const Eigen::MatrixXd& L, double tau0) { return count_below(L, tau0); }

IndexCount constrained_morse_index(const Eigen::MatrixXd& L, const Field& u, double tau0)
{
    if (L.rows() != u.size())
        throw GridMismatch("operator size does not match the field");
    if (u.mass() == 0.0)
        throw InvalidField("cannot restrict to the tangent space of the zero field");
    const Eigen::VectorXd w = linalg::householder_vector(u.values());
    const Eigen::MatrixXd r = linalg::reflect_both_sides(L, w);
    const Eigen::Index n = L.rows() - 1;
    return count_below(r.bottomRightCorner(n, n), tau0);
}

namespace {

Field solve_z(const Eigen::MatrixXd& L, const Field& u)
{
    const linalg::SymmetricIndefinite fac(L);
    Eigen::VectorXd z = fac.solve(u.values());
    // one step of refinement keeps the residual near roundoff
    z += fac.solve(u.values() - L * z);
    return Field(u.grid(), std::move(z));
}

} // namespace

Field z_vector(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f, double tau0)
{
    if (tau0 < 0.0)
        tau0 = zero_threshold(u, lambda, V, f);
    const Eigen::MatrixXd L = linearized_matrix(u, lambda, V, f);
    const IndexCount c = count_below(L, tau0);
    if (c.gap <= tau0)
        throw NotFreelyNondegenerate("linearized operator has an eigenvalue " + std::to_string(c.gap) +
                                     " within the zero threshold " + std::to_string(tau0));
    return solve_z(L, u);
}

SpectralReport classify(const Field& u, double lambda, const SampledPotential& V, const Nonlinearity& f,
                        const SpectralOptions& opts)
{
    SpectralReport rep;
    rep.tau0 = zero_threshold(u, lambda, V, f, opts.tau_rel);
    const Eigen::MatrixXd L = linearized_matrix(u, lambda, V, f);

    const IndexCount free = free_morse_index(L, rep.tau0);
    const IndexCount cons = constrained_morse_index(L, u, rep.tau0);
    rep.m_f = free.count;
    rep.m = cons.count;
    rep.spectral_gap = free.gap;
    rep.eigenvalues_near_zero = free.near_zero;
    rep.constrained_near_zero = cons.near_zero;
    rep.free_eigenvalues = to_vector(free.eigenvalues);
    rep.constrained_eigenvalues = to_vector(cons.eigenvalues);
    rep.form_on_u = u.grid().h() * u.values().dot(L * u.values());
    rep.sign_definite = u.min() > 0.0 || u.max() < 0.0;

    if (free.gap > rep.tau0) {
        const Field z = solve_z(L, u);
        rep.z_dot_u = inner_l2(z, u);
        if (std::abs(rep.z_dot_u) > rep.tau0)
            rep.classification =
                rep.z_dot_u > 0.0 ? Classification::fully_nondegenerate_pos : Classification::fully_nondegenerate_neg;
    } else {
        rep.z_dot_u = std::numeric_limits<double>::quiet_NaN();
    }

    const int diff = rep.m_f - rep.m;
    rep.consistent = diff == 0 || diff == 1;
    if (rep.classification == Classification::fully_nondegenerate_pos)
        rep.consistent = rep.consistent && diff == 0 && cons.near_zero.empty();
    if (rep.classification == Classification::fully_nondegenerate_neg)
        rep.consistent = rep.consistent && diff == 1 && cons.near_zero.empty();
    return rep;
}

ZTranslateCheck z_translate_check(const ConstrainedCriticalPoint& ubar, const SampledPotential& V_ubar,
                                  const ConstrainedCriticalPoint& glued, const SampledPotential& V,
                                  const Nonlinearity& f, const BumpConfig& cfg, double window, double lattice)
{
    if (lattice == 0.0)
        lattice = V.potential().periodic() ? V.potential().period() : 1.0;
    const Field z_bar = resample(z_vector(ubar.u, ubar.lambda, V_ubar, f), V.grid());
    const Field u_bar = resample(ubar.u, V.grid());
    const Field z_a = z_vector(glued.u, glued.lambda, V, f);

    Eigen::Index peak = 0;
    u_bar.values().cwiseAbs().maxCoeff(&peak);
    const double center = V.grid().x(peak);
    const double gap = V_ubar.bottom() - ubar.lambda;
    const double half = window / std::sqrt(std::max(gap, 1e-12));

    ZTranslateCheck out;
    const double h = V.grid().h();
    for (long a : cfg.offsets()) {
        const Field back = translate(z_a, -a, lattice);
        double acc = 0.0;
        for (int i = 0; i < V.grid().M; ++i)
            if (std::abs(V.grid().x(i) - center) <= half) {
                const double d = back[i] - z_bar[i];
                acc += d * d;
            }
        out.field_discrepancy = std::max(out.field_discrepancy, std::sqrt(h * acc));
    }
    const double single = inner_l2(z_bar, u_bar);
    out.scalar_discrepancy = std::abs(inner_l2(z_a, glued.u) - cfg.n() * single);
    out.scalar_relative = out.scalar_discrepancy / std::abs(cfg.n() * single);
    return out;
}

InstabilityResult instability_eigenvalue(const ConstrainedCriticalPoint& phi, const SampledPotential& V,
                                         const Nonlinearity& f, double tau_rel)
{
    const Field& u = phi.u;
    const double lambda = phi.lambda;
    if (!(u.min() > 0.0))
        throw AssumptionViolation("instability construction needs a positive standing wave");
    if (!(lambda < V.bottom()))
        throw AssumptionViolation("multiplier " + std::to_string(lambda) + " is not below the spectrum bottom " +
                                  std::to_string(V.bottom()));
    const double h = u.grid().h();
    const Eigen::Index m = u.size();

    const Eigen::MatrixXd l1 = linearized_matrix(u, lambda, V, f);
    Eigen::MatrixXd l2 = laplacian_matrix(u.grid());
    for (Eigen::Index i = 0; i < m; ++i)
        l2(i, i) += V.values()[i] - lambda - f.ratio(u[i]);

    InstabilityResult res;
    res.l2_phi_residual = (l2 * u.values()).cwiseAbs().maxCoeff();
    if (!(res.l2_phi_residual < 1e-6))
        throw AssumptionViolation("standing wave is not in the kernel of L2: residual " +
                                  std::to_string(res.l2_phi_residual));

    // Orthonormal basis Q of the complement of φ; C = Q^T L2 Q, A = Q^T L1 Q.
    const Eigen::VectorXd w = linalg::householder_vector(u.values());
    const Eigen::Index n = m - 1;
    const Eigen::MatrixXd c = linalg::reflect_both_sides(l2, w).bottomRightCorner(n, n);
    const Eigen::MatrixXd a = linalg::reflect_both_sides(l1, w).bottomRightCorner(n, n);
    const auto r = linalg::cholesky_lower(c);
    if (!r)
        throw PositivityViolation("L2 is not positive on the complement of the standing wave");

    // A x = μ C^{-1} x with x = R y becomes R^T A R y = μ y.
    const Eigen::MatrixXd ar = a * (*r);
    Eigen::MatrixXd sym = r->transpose() * ar;
    sym = 0.5 * (sym + sym.transpose());
    const linalg::EigenSubset low = linalg::lowest_eigenpairs(sym, 1, true);
    res.mu = low.values[0];
    const double tau0 = zero_threshold(u, lambda, V, f, tau_rel);
    if (!(res.mu < -tau0))
        throw NoInstabilityDetected("smallest constrained eigenvalue " + std::to_string(res.mu) +
                                        " is not below -" + std::to_string(tau0),
                                    res.mu);

    const Eigen::VectorXd y = low.vectors.col(0);
    auto embed = [&](const Eigen::VectorXd& x) {
        // Q x = H [0; x]
        Eigen::VectorXd full(m);
        full[0] = 0.0;
        full.tail(n) = x;
        return Eigen::VectorXd(full - 2.0 * w * w.dot(full));
    };
    const Eigen::VectorXd x = (*r) * y;
    Eigen::VectorXd v = embed(x);
    // L2^+ v = Q C^{-1} Q^T v = Q R^{-T} y
    Eigen::VectorXd l2p = embed(r->transpose().triangularView<Eigen::Upper>().solve(y));

    const double scale = 1.0 / std::sqrt(h * v.squaredNorm());
    v *= scale;
    l2p *= scale;

    const Eigen::VectorXd phi_v = u.values();
    const double phi_sq = h * phi_v.squaredNorm();
    res.beta = h * (l1 * v - res.mu * l2p).dot(phi_v) / phi_sq;
    res.rho = std::sqrt(-res.mu);
    const Eigen::VectorXd w1 = v;
    const Eigen::VectorXd w2 = -res.rho * l2p + (res.beta / res.rho) * phi_v;

    const Eigen::VectorXd r1 = -(l2 * w2) - res.rho * w1;
    const Eigen::VectorXd r2 = l1 * w1 - res.rho * w2;
    const double wscale = res.rho * std::max(w1.cwiseAbs().maxCoeff(), w2.cwiseAbs().maxCoeff());
    res.block_residual = std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff()) / wscale;
    res.orthogonality = std::abs(h * v.dot(phi_v));
    res.v = Field(u.grid(), v);
    res.w_first = Field(u.grid(), w1);
    res.w_second = Field(u.grid(), w2);
    return res;
}

} // namespace nlsw
