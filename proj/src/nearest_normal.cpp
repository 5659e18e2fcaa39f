#include "nearnormal/nearest_normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nearnormal/random.hpp"

namespace nearnormal {

namespace {

double diagonal_mass(const CMatrix& b)
{
    return b.diagonal().squaredNorm();
}

double off_diagonal_mass(const CMatrix& b)
{
    return std::max(0.0, b.squaredNorm() - diagonal_mass(b));
}

// Applies the plane rotation G = [[g0, -conj(g1)], [g1, conj(g0)]] on the
// (i, j) coordinates: U <- U G, B <- G* B G.
void rotate(CMatrix& u, CMatrix& b, Eigen::Index i, Eigen::Index j, const PlaneRotation& r)
{
    const Complex g0 = r.cos_part;
    const Complex g1 = r.sin_part;
    const Complex h0 = -std::conj(g1);
    const Complex h1 = std::conj(g0);

    for (Eigen::Index k = 0; k < u.rows(); ++k) {
        const Complex ui = u(k, i);
        const Complex uj = u(k, j);
        u(k, i) = g0 * ui + g1 * uj;
        u(k, j) = h0 * ui + h1 * uj;
    }
    for (Eigen::Index k = 0; k < b.rows(); ++k) {
        const Complex bi = b(k, i);
        const Complex bj = b(k, j);
        b(k, i) = g0 * bi + g1 * bj;
        b(k, j) = h0 * bi + h1 * bj;
    }
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
        const Complex bi = b(i, k);
        const Complex bj = b(j, k);
        b(i, k) = std::conj(g0) * bi + std::conj(g1) * bj;
        b(j, k) = std::conj(h0) * bi + std::conj(h1) * bj;
    }
}

CMatrix nearest_unitary(const CMatrix& u)
{
    const SVD d = svd(u);
    return d.left * d.right.adjoint();
}

struct AscentState {
    CMatrix u;
    CMatrix b;
    std::vector<double> history;
    int sweeps = 0;
    bool converged = false;
};

AscentState ascend(const CMatrix& a, CMatrix start, const DiagonalOptions& opts, double scale)
{
    AscentState s;
    s.u = std::move(start);
    s.b = s.u.adjoint() * a * s.u;
    const Eigen::Index n = a.rows();
    double current = diagonal_mass(s.b);
    s.history.push_back(current);

    while (s.sweeps < opts.max_sweeps) {
        CMatrix u_next = s.u;
        CMatrix b_next = s.b;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const PlaneRotation r =
                    best_plane_rotation(b_next(i, i), b_next(i, j), b_next(j, i), b_next(j, j));
                if (r.gain > 0.0)
                    rotate(u_next, b_next, i, j, r);
            }
        }
        ++s.sweeps;
        const double next = diagonal_mass(b_next);
        if (!(next > current)) {
            s.converged = true;
            break;
        }
        const double gain = next - current;
        s.u = std::move(u_next);
        s.b = std::move(b_next);
        current = next;
        s.history.push_back(current);
        if (gain < opts.obj_tol * scale) {
            s.converged = true;
            break;
        }
    }
    return s;
}

} // namespace

PlaneRotation best_plane_rotation(Complex a, Complex b, Complex c, Complex d)
{
    // With N the traceless part of the block and g = (cos t, e^{i phi} sin t),
    // g* N g = v . w for the unit vector v = (cos 2t, sin 2t cos phi,
    // sin 2t sin phi) and w below. Splitting w = p + i q, |v . w|^2 =
    // (v.p)^2 + (v.q)^2 is maximized by the top eigenvector of p p^T + q q^T,
    // which lies in span{p, q}.
    const Complex n11 = 0.5 * (a - d);
    const Complex w[3] = {n11, 0.5 * (b + c), Complex(0.0, 0.5) * (b - c)};
    Eigen::Vector3d p;
    Eigen::Vector3d q;
    for (int k = 0; k < 3; ++k) {
        p[k] = w[k].real();
        q[k] = w[k].imag();
    }
    const double pp = p.squaredNorm();
    const double qq = q.squaredNorm();
    const double pq = p.dot(q);
    const double mean = 0.5 * (pp + qq);
    const double diff = 0.5 * (pp - qq);
    const double top = mean + std::hypot(diff, pq);

    PlaneRotation r{Complex(1.0, 0.0), Complex(0.0, 0.0), 0.0};
    const double current = std::norm(n11);
    if (!(top > current))
        return r;

    // Top eigenvector (alpha, beta) of [[pp, pq], [pq, qq]].
    double alpha = 0.0;
    double beta = 0.0;
    if (std::abs(pq) > 0.0) {
        alpha = pq;
        beta = top - pp;
        if (std::abs(alpha) + std::abs(beta) < 1e-300) {
            alpha = top - qq;
            beta = pq;
        }
    } else if (pp >= qq) {
        alpha = 1.0;
    } else {
        beta = 1.0;
    }
    Eigen::Vector3d v = alpha * p + beta * q;
    const double len = v.norm();
    if (!(len > 0.0))
        return r;
    v /= len;

    const double two_t = std::acos(std::clamp(v[0], -1.0, 1.0));
    const double phi = std::atan2(v[2], v[1]);
    r.cos_part = Complex(std::cos(0.5 * two_t), 0.0);
    r.sin_part = std::polar(std::sin(0.5 * two_t), phi);
    r.gain = 2.0 * (top - current);
    return r;
}

DiagonalResult maximize_diagonal(const CMatrix& a, const DiagonalOptions& opts)
{
    require_square(a, "maximize_diagonal");
    require_finite(a, "maximize_diagonal");
    if (opts.max_sweeps < 1 || opts.restarts < 0 || !(opts.obj_tol >= 0.0))
        throw std::invalid_argument("maximize_diagonal: invalid options");
    const Eigen::Index n = a.rows();
    const double scale = a.squaredNorm();

    Rng rng(opts.seed);
    DiagonalResult best;
    bool have = false;
    for (int start = 0; start <= opts.restarts; ++start) {
        CMatrix u0 = start == 0 ? CMatrix::Identity(n, n) : haar_unitary(n, rng);
        AscentState s = ascend(a, std::move(u0), opts, scale);
        const double value = s.history.back();
        if (!have || value > best.objective) {
            best.basis = std::move(s.u);
            best.compressed = std::move(s.b);
            best.objective = value;
            best.objective_history = std::move(s.history);
            best.sweeps = s.sweeps;
            best.converged = s.converged;
            best.start_index = start;
            have = true;
        }
    }

    // Remove the rounding drift accumulated by the rotations.
    if (n > 0) {
        best.basis = nearest_unitary(best.basis);
        best.compressed = best.basis.adjoint() * a * best.basis;
    }
    return best;
}

double commutator_lower_bound(const CMatrix& a, double p)
{
    const double norm = operator_norm(a);
    if (norm == 0.0)
        return 0.0;
    return schatten_norm(self_commutator(a), p) / (4.0 * norm);
}

DistanceReport nearest_normal(const CMatrix& a, const std::vector<double>& ps,
                              const DiagonalOptions& opts)
{
    require_square(a, "nearest_normal");
    require_finite(a, "nearest_normal");
    const Eigen::Index n = a.rows();
    DistanceReport r;

    if (a.squaredNorm() == 0.0) {
        r.witness = CMatrix::Zero(n, n);
        r.basis = CMatrix::Identity(n, n);
        for (double p : ps) {
            (void)schatten_norm(r.witness, p);  // validates p
            r.distances[p] = 0.0;
            r.lower_bounds[p] = 0.0;
        }
        r.objective_history = {0.0};
        r.converged = true;
        return r;
    }

    const DiagonalResult opt = maximize_diagonal(a, opts);
    r.basis = opt.basis;
    r.witness = opt.basis * opt.compressed.diagonal().asDiagonal() * opt.basis.adjoint();
    r.frobenius_exact = std::sqrt(off_diagonal_mass(opt.compressed));
    const CMatrix diff = a - r.witness;
    for (double p : ps) {
        r.distances[p] = schatten_norm(diff, p);
        r.lower_bounds[p] = commutator_lower_bound(a, p);
    }
    r.sweeps = opt.sweeps;
    r.objective_history = opt.objective_history;
    r.converged = opt.converged;
    r.witness_defect = normality_defect(r.witness);
    return r;
}

} // namespace nearnormal
