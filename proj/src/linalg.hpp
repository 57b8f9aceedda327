#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

// Dense symmetric kernels on top of LAPACK. Everything here copies its input;
// callers keep their matrices.
namespace nlsw::linalg {

struct EigenSubset {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // empty unless requested
};

// The k smallest eigenvalues of the symmetric matrix a.
EigenSubset lowest_eigenpairs(const Eigen::MatrixXd& a, int k, bool want_vectors);

// Smallest eigenvalues, enlarging the window until one exceeds `above`
// (or the whole spectrum is computed).
Eigen::VectorXd eigenvalues_through(const Eigen::MatrixXd& a, double above, int start = 8);

// Bunch-Kaufman factorization of a symmetric indefinite matrix.
class SymmetricIndefinite {
public:
    explicit SymmetricIndefinite(Eigen::MatrixXd a);
    bool singular() const { return singular_; }
    // Reciprocal 1-norm condition estimate.
    double rcond() const;
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
    Eigen::MatrixXd lu_;
    std::vector<int> ipiv_;
    double anorm_ = 0.0;
    bool singular_ = false;
};

// Lower Cholesky factor, or nothing if a is not positive definite.
std::optional<Eigen::MatrixXd> cholesky_lower(const Eigen::MatrixXd& a);

// Householder vector w with (I - 2 w w^T) u = -sign(u_0)|u| e_0.
// Columns 1.. of the reflector span the orthogonal complement of u.
Eigen::VectorXd householder_vector(const Eigen::VectorXd& u);

// H a H for H = I - 2 w w^T, without forming H.
Eigen::MatrixXd reflect_both_sides(const Eigen::MatrixXd& a, const Eigen::VectorXd& w);

// The orthonormal basis of span(u)^perp given by the reflector columns 1..n-1.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& w);

} // namespace nlsw::linalg
