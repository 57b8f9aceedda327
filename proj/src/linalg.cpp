#include "linalg.hpp"

#include "nlsw/error.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace nlsw::linalg {

EigenSubset lowest_eigenpairs(const Eigen::MatrixXd& a, int k, bool want_vectors)
{
    const lapack_int n = static_cast<lapack_int>(a.rows());
    k = std::clamp(k, 1, static_cast<int>(n));
    Eigen::MatrixXd work = a;
    EigenSubset out;
    out.values.resize(n);
    if (want_vectors)
        out.vectors.resize(n, k);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(k, 1)));
    lapack_int found = 0;
    double dummy = 0.0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', 'L', n,
                                     work.data(), n, 0.0, 0.0, 1, k, 0.0, &found, out.values.data(),
                                     want_vectors ? out.vectors.data() : &dummy, want_vectors ? n : 1,
                                     isuppz.data());
    if (info != 0)
        throw SolverError("dsyevr failed with info " + std::to_string(info));
    out.values.conservativeResize(found);
    return out;
}

Eigen::VectorXd eigenvalues_through(const Eigen::MatrixXd& a, double above, int start)
{
    const int n = static_cast<int>(a.rows());
    int k = std::min(start, n);
    while (true) {
        Eigen::VectorXd vals = lowest_eigenpairs(a, k, false).values;
        if (vals[vals.size() - 1] > above || k == n)
            return vals;
        k = std::min(2 * k, n);
    }
}

SymmetricIndefinite::SymmetricIndefinite(Eigen::MatrixXd a) : lu_(std::move(a))
{
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    anorm_ = lu_.cwiseAbs().colwise().sum().maxCoeff();
    ipiv_.resize(n);
    lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, lu_.data(), n, ipiv_.data());
    if (info < 0)
        throw SolverError("dsytrf failed with info " + std::to_string(info));
    singular_ = info > 0;
}

double SymmetricIndefinite::rcond() const
{
    if (singular_)
        return 0.0;
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    double rc = 0.0;
    lapack_int info = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', n, lu_.data(), n, ipiv_.data(), anorm_, &rc);
    if (info != 0)
        throw SolverError("dsycon failed with info " + std::to_string(info));
    return rc;
}

Eigen::VectorXd SymmetricIndefinite::solve(const Eigen::VectorXd& b) const
{
    if (singular_)
        throw SingularOperator("symmetric factorization is exactly singular", 0.0);
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    Eigen::VectorXd x = b;
    lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, lu_.data(), n, ipiv_.data(), x.data(), n);
    if (info != 0)
        throw SolverError("dsytrs failed with info " + std::to_string(info));
    return x;
}

std::optional<Eigen::MatrixXd> cholesky_lower(const Eigen::MatrixXd& a)
{
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd l = a;
    lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, l.data(), n);
    if (info != 0)
        return std::nullopt;
    l.triangularView<Eigen::StrictlyUpper>().setZero();
    return l;
}

Eigen::VectorXd householder_vector(const Eigen::VectorXd& u)
{
    const double norm = u.norm();
    Eigen::VectorXd w = u;
    const double s = u[0] >= 0.0 ? 1.0 : -1.0;
    w[0] += s * norm;
    w /= w.norm();
    return w;
}

Eigen::MatrixXd reflect_both_sides(const Eigen::MatrixXd& a, const Eigen::VectorXd& w)
{
    const Eigen::VectorXd aw = a * w;
    const double waw = w.dot(aw);
    Eigen::MatrixXd out = a;
    out.noalias() -= 2.0 * w * aw.transpose();
    out.noalias() -= 2.0 * aw * w.transpose();
    out.noalias() += (4.0 * waw) * w * w.transpose();
    return out;
}

Eigen::MatrixXd complement_basis(const Eigen::VectorXd& w)
{
    const Eigen::Index n = w.size();
    Eigen::MatrixXd q = -2.0 * w * w.tail(n - 1).transpose();
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        q(j + 1, j) += 1.0;
    return q;
}

} // namespace nlsw::linalg
