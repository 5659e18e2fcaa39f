#include "nearnormal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nearnormal/errors.hpp"

namespace nearnormal {

void require_square(const CMatrix& a, const char* what)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument(std::string(what) + ": matrix must be square");
}

void require_finite(const CMatrix& a, const char* what)
{
    if (!a.allFinite())
        throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
}

void require_same_shape(const CMatrix& x, const CMatrix& y)
{
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(x.rows()) + "x" +
                                    std::to_string(x.cols()) + " vs " + std::to_string(y.rows()) +
                                    "x" + std::to_string(y.cols()));
}

CMatrix hermitian_part(const CMatrix& a)
{
    return (a + a.adjoint()) * 0.5;
}

CMatrix imaginary_part(const CMatrix& a)
{
    return (a - a.adjoint()) * Complex(0.0, -0.5);
}

CMatrix commutator(const CMatrix& x, const CMatrix& y)
{
    require_same_shape(x, y);
    require_square(x, "commutator");
    CMatrix c = x * y - y * x;
    if (x == y.adjoint())
        c = hermitian_part(c);
    return c;
}

CMatrix self_commutator(const CMatrix& a)
{
    require_square(a, "self_commutator");
    CMatrix c = a.adjoint() * a - a * a.adjoint();
    return hermitian_part(c);
}

SVD svd(const CMatrix& a)
{
    require_square(a, "svd");
    if (a.size() == 0)
        return {};
    Eigen::BDCSVD<CMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {dec.singularValues(), dec.matrixU(), dec.matrixV()};
}

RVector singular_values(const CMatrix& a)
{
    if (a.size() == 0)
        return RVector(0);
    Eigen::BDCSVD<CMatrix> dec(a);
    return dec.singularValues();
}

double schatten_norm(const CMatrix& a, double p)
{
    if (!(p >= 1.0))
        throw std::invalid_argument("schatten_norm: p must be >= 1");
    const RVector s = singular_values(a);
    if (s.size() == 0)
        return 0.0;
    const double top = s.maxCoeff();
    if (std::isinf(p) || top == 0.0)
        return top;
    if (p == 2.0)
        return top * (s / top).norm();
    double acc = 0.0;
    for (double v : s)
        acc += std::pow(v / top, p);
    return top * std::pow(acc, 1.0 / p);
}

double operator_norm(const CMatrix& a)
{
    return schatten_norm(a, kOperatorNorm);
}

double frobenius_norm(const CMatrix& a)
{
    return a.norm();
}

double normality_defect(const CMatrix& a)
{
    return operator_norm(self_commutator(a));
}

double unitarity_error(const CMatrix& u)
{
    return operator_norm(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

HermitianEig hermitian_eig(const CMatrix& a, const Tolerances& tol)
{
    require_square(a, "hermitian_eig");
    require_finite(a, "hermitian_eig");
    const double scale = a.norm();
    if ((a - a.adjoint()).norm() > tol.hermitian * scale)
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
    if (a.size() == 0)
        return {};
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix SpectralDecomp::reconstruct() const
{
    return with_eigenvalues(eigenvalues);
}

CMatrix SpectralDecomp::with_eigenvalues(const CVector& values) const
{
    if (values.size() != eigenvalues.size())
        throw std::invalid_argument("with_eigenvalues: wrong number of eigenvalues");
    return basis * values.asDiagonal() * basis.adjoint();
}

SpectralDecomp make_spectral_decomp(CVector eigenvalues, CMatrix basis, const Tolerances& tol)
{
    require_square(basis, "make_spectral_decomp");
    if (basis.cols() != eigenvalues.size())
        throw std::invalid_argument("make_spectral_decomp: basis and eigenvalues disagree in size");
    if (!eigenvalues.allFinite())
        throw std::invalid_argument("make_spectral_decomp: non-finite eigenvalue");
    if (basis.size() > 0 && unitarity_error(basis) > tol.unitary)
        throw std::invalid_argument("make_spectral_decomp: basis is not unitary");
    return {std::move(eigenvalues), std::move(basis)};
}

SpectralDecomp normal_spectral_decomp(const CMatrix& a, const Tolerances& tol)
{
    require_square(a, "normal_spectral_decomp");
    require_finite(a, "normal_spectral_decomp");
    const Eigen::Index n = a.rows();
    const double scale = operator_norm(a);
    if (scale == 0.0)
        return {CVector::Zero(n), CMatrix::Identity(n, n)};

    const double defect = normality_defect(a);
    if (defect > tol.normal * scale * scale)
        throw NotNormal(defect);

    // Re A and Im A commute, so Im A is block diagonal in any eigenbasis of
    // Re A whose blocks are the eigenvalue clusters of Re A.
    Eigen::SelfAdjointEigenSolver<CMatrix> re_eig(hermitian_part(a));
    CMatrix q = re_eig.eigenvectors();
    const RVector& x = re_eig.eigenvalues();
    const CMatrix y = imaginary_part(a);
    const double gap = tol.cluster * scale;

    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && x[end] - x[end - 1] <= gap)
            ++end;
        const Eigen::Index len = end - start;
        if (len > 1) {
            const CMatrix qc = q.middleCols(start, len);
            const CMatrix yc = hermitian_part(qc.adjoint() * y * qc);
            Eigen::SelfAdjointEigenSolver<CMatrix> im_eig(yc);
            q.middleCols(start, len) = qc * im_eig.eigenvectors();
        }
        start = end;
    }

    CVector lambda(n);
    for (Eigen::Index k = 0; k < n; ++k)
        lambda[k] = q.col(k).dot(a * q.col(k));
    return {lambda, q};
}

PolarDecomp polar_decomp(const CMatrix& a)
{
    require_square(a, "polar_decomp");
    require_finite(a, "polar_decomp");
    if (a.size() == 0)
        return {};
    const SVD d = svd(a);
    CMatrix v = d.left * d.right.adjoint();
    CMatrix p = d.right * d.singular_values.cast<Complex>().asDiagonal() * d.right.adjoint();
    return {std::move(v), hermitian_part(p)};
}

NormReport norm_report(const CMatrix& a, std::span<const double> ps)
{
    NormReport r;
    r.operator_norm = operator_norm(a);
    r.frobenius = frobenius_norm(a);
    for (double p : ps)
        r.schatten[p] = schatten_norm(a, p);
    r.normality_defect = normality_defect(a);
    return r;
}

} // namespace nearnormal
