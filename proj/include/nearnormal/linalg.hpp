#pragma once

#include <complex>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nearnormal {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Schatten index standing for the operator norm.
inline constexpr double kOperatorNorm = std::numeric_limits<double>::infinity();

/// Relative tolerances shared by the spectral routines. All are scaled by the
/// norm of the matrix at hand, so the zero matrix passes every check.
struct Tolerances {
    double unitary = 1e-9;
    double reconstruct = 1e-9;
    double normal = 1e-8;     ///< admissible ||[A*,A]|| / ||A||^2
    double cluster = 1e-8;    ///< eigenvalue gap of Re A treated as degenerate, relative to ||A||
    double hermitian = 1e-9;  ///< admissible ||A - A*||_F / ||A||_F
};

void require_square(const CMatrix& a, const char* what);
void require_finite(const CMatrix& a, const char* what);
void require_same_shape(const CMatrix& x, const CMatrix& y);

CMatrix hermitian_part(const CMatrix& a);  ///< Re A = (A + A*)/2
CMatrix imaginary_part(const CMatrix& a);  ///< Im A = (A - A*)/2i

/// XY - YX. When X is bit-identical to Y*, the result is replaced by its
/// Hermitian part.
CMatrix commutator(const CMatrix& x, const CMatrix& y);

/// The self-commutator [A*, A], Hermitian by construction.
CMatrix self_commutator(const CMatrix& a);

struct SVD {
    RVector singular_values;  ///< descending
    CMatrix left;             ///< U
    CMatrix right;            ///< W, with A = U diag(sigma) W*
};

SVD svd(const CMatrix& a);
RVector singular_values(const CMatrix& a);

/// (sum sigma_i^p)^(1/p); p = kOperatorNorm gives the largest singular value.
/// Throws std::invalid_argument for p < 1.
double schatten_norm(const CMatrix& a, double p);
double operator_norm(const CMatrix& a);
double frobenius_norm(const CMatrix& a);

/// Operator norm of the self-commutator.
double normality_defect(const CMatrix& a);

struct HermitianEig {
    RVector eigenvalues;  ///< ascending
    CMatrix basis;        ///< columns are orthonormal eigenvectors
};

HermitianEig hermitian_eig(const CMatrix& a, const Tolerances& tol = {});

/// Eigenvalues and a unitary eigenbasis of a normal matrix:
/// A = basis * diag(eigenvalues) * basis*.
struct SpectralDecomp {
    CVector eigenvalues;
    CMatrix basis;

    Eigen::Index dim() const { return eigenvalues.size(); }
    CMatrix reconstruct() const;
    /// basis * diag(values) * basis*, the functional-calculus image for new eigenvalues.
    CMatrix with_eigenvalues(const CVector& values) const;
};

/// Simultaneous diagonalization of Re A and Im A. Throws NotNormal when
/// ||[A*,A]|| > tol.normal * ||A||^2.
SpectralDecomp normal_spectral_decomp(const CMatrix& a, const Tolerances& tol = {});

/// Builds the decomposition directly from a known eigenbasis (checked unitary).
SpectralDecomp make_spectral_decomp(CVector eigenvalues, CMatrix basis,
                                    const Tolerances& tol = {});

struct PolarDecomp {
    CMatrix unitary;   ///< V
    CMatrix positive;  ///< P = (A*A)^{1/2}
};

/// A = V P with V unitary; on a singular A the partial isometry is completed
/// to a unitary through the SVD.
PolarDecomp polar_decomp(const CMatrix& a);

struct NormReport {
    double operator_norm = 0.0;
    std::map<double, double> schatten;
    double frobenius = 0.0;
    double normality_defect = 0.0;
};

NormReport norm_report(const CMatrix& a, std::span<const double> ps);

/// ||U*U - I|| in the operator norm.
double unitarity_error(const CMatrix& u);

/// 0/0 is defined as 0.
inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

} // namespace nearnormal
