#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "nearnormal/linalg.hpp"
#include "nearnormal/random.hpp"

namespace testsupport {

using nearnormal::CMatrix;
using nearnormal::Complex;
using nearnormal::CVector;

inline CMatrix gaussian(int rows, int cols, std::uint64_t seed)
{
    nearnormal::Rng rng(seed);
    return nearnormal::complex_gaussian(rows, cols, rng);
}

// Random square matrix rescaled to a random operator norm in (0, 1].
inline CMatrix random_contraction(int dim, std::uint64_t seed)
{
    nearnormal::Rng rng(seed);
    CMatrix a = nearnormal::complex_gaussian(dim, dim, rng);
    std::uniform_real_distribution<double> scale(0.05, 1.0);
    return a * (scale(rng) / nearnormal::operator_norm(a));
}

inline int dim_for(std::uint64_t seed, int lo, int hi)
{
    std::mt19937_64 rng(seed * 7919 + 17);
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Circulant with first column c: eigenvalues are the DFT sum_k c_k w^{jk}.
inline CMatrix circulant(const CVector& c)
{
    const auto n = c.size();
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = c((i - j + n) % n);
    return a;
}

inline std::vector<Complex> dft_eigenvalues(const CVector& c)
{
    const auto n = c.size();
    std::vector<Complex> out;
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex s = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            s += c(k) * std::polar(1.0, 2.0 * std::numbers::pi * double(j * k) / double(n));
        out.push_back(s);
    }
    return out;
}

// Greedy matching distance between two multisets of equal size.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b)
{
    double worst = 0.0;
    for (Complex z : a) {
        auto best = std::min_element(b.begin(), b.end(), [z](Complex x, Complex y) {
            return std::abs(x - z) < std::abs(y - z);
        });
        worst = std::max(worst, std::abs(*best - z));
        b.erase(best);
    }
    return worst;
}

inline std::vector<Complex> to_vector(const CVector& v)
{
    return {v.data(), v.data() + v.size()};
}

// |u* B u|^2 + |v* B v|^2 for u = (cos t, e^{ip} sin t), v its orthogonal complement.
inline double plane_objective(const CMatrix& b, double t, double p)
{
    const Complex e = std::polar(1.0, p);
    const double c = std::cos(t);
    const double s = std::sin(t);
    const Complex cross = c * s * (b(0, 1) * e + b(1, 0) * std::conj(e));
    const Complex du = b(0, 0) * (c * c) + b(1, 1) * (s * s) + cross;
    const Complex dv = b(0, 0) * (s * s) + b(1, 1) * (c * c) - cross;
    return std::norm(du) + std::norm(dv);
}

// Brute-force maximum of plane_objective: a grid over t in [0, pi/2] and
// p in [0, 2 pi), then shrinking local grids around the best cell.
inline double brute_force_plane_max(const CMatrix& b, int grid)
{
    const double pi = std::numbers::pi;
    double best = -1.0;
    double bt = 0.0;
    double bp = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double t = 0.5 * pi * i / grid;
        for (int j = 0; j < grid; ++j) {
            const double p = 2.0 * pi * j / grid;
            const double f = plane_objective(b, t, p);
            if (f > best) {
                best = f;
                bt = t;
                bp = p;
            }
        }
    }
    double ht = 0.5 * pi / grid;
    double hp = 2.0 * pi / grid;
    for (int round = 0; round < 30; ++round) {
        const double t0 = bt;
        const double p0 = bp;
        for (int i = -4; i <= 4; ++i)
            for (int j = -4; j <= 4; ++j) {
                const double t = t0 + i * ht / 4.0;
                const double p = p0 + j * hp / 4.0;
                const double f = plane_objective(b, t, p);
                if (f > best) {
                    best = f;
                    bt = t;
                    bp = p;
                }
            }
        ht *= 0.5;
        hp *= 0.5;
    }
    return best;
}

// Grid-plus-Newton solution of the 2x2 plane problem: coarse grid, then
// Newton steps on the gradient with finite-difference derivatives.
inline double grid_newton_plane_max(const CMatrix& b)
{
    const double pi = std::numbers::pi;
    const int grid = 64;
    double best = -1.0;
    double bt = 0.0;
    double bp = 0.0;
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double t = 0.5 * pi * i / grid;
            const double p = 2.0 * pi * j / grid;
            const double f = plane_objective(b, t, p);
            if (f > best) {
                best = f;
                bt = t;
                bp = p;
            }
        }
    const double h = 1e-5;
    for (int it = 0; it < 50; ++it) {
        auto f = [&](double t, double p) { return plane_objective(b, t, p); };
        const double f0 = f(bt, bp);
        const double gt = (f(bt + h, bp) - f(bt - h, bp)) / (2 * h);
        const double gp = (f(bt, bp + h) - f(bt, bp - h)) / (2 * h);
        const double htt = (f(bt + h, bp) - 2 * f0 + f(bt - h, bp)) / (h * h);
        const double hpp = (f(bt, bp + h) - 2 * f0 + f(bt, bp - h)) / (h * h);
        const double htp = (f(bt + h, bp + h) - f(bt + h, bp - h) - f(bt - h, bp + h) +
                            f(bt - h, bp - h)) / (4 * h * h);
        const double det = htt * hpp - htp * htp;
        if (det <= 0.0 || htt >= 0.0)
            break;
        const double dt = -(hpp * gt - htp * gp) / det;
        const double dp = -(-htp * gt + htt * gp) / det;
        if (f(bt + dt, bp + dp) < f0)
            break;
        bt += dt;
        bp += dp;
        if (std::abs(dt) + std::abs(dp) < 1e-14)
            break;
    }
    return std::max(best, plane_objective(b, bt, bp));
}

} // namespace testsupport
