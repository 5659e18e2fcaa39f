#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nearnormal/linalg.hpp"

namespace nearnormal {

struct DiagonalOptions {
    int max_sweeps = 200;
    double obj_tol = 1e-12;  ///< stop when a sweep gains less than obj_tol * ||A||_2^2
    int restarts = 4;        ///< random unitary starts in addition to the identity start
    std::uint64_t seed = 0;
};

struct DiagonalResult {
    CMatrix basis;                        ///< unitary U
    CMatrix compressed;                   ///< U* A U
    double objective = 0;                 ///< sum_j |(U* A U)_jj|^2
    std::vector<double> objective_history;  ///< one entry per accepted sweep, strictly increasing
    int sweeps = 0;
    bool converged = false;
    int start_index = 0;                  ///< 0 = identity, k = k-th random start
};

/// Rotation in the (i, j) plane maximizing |b'_ii|^2 + |b'_jj|^2 for the 2x2
/// block [[a, b], [c, d]]. Returns (g, gain): g is the new first basis vector
/// (the second is its orthogonal complement) and gain the objective increase.
struct PlaneRotation {
    Complex cos_part;  ///< g_0, real and non-negative
    Complex sin_part;  ///< g_1
    double gain = 0;
};

PlaneRotation best_plane_rotation(Complex a, Complex b, Complex c, Complex d);

/// Coordinate ascent over unitary bases for sum_j |(A u_j, u_j)|^2, cycling
/// through all planes; best of the identity start and `restarts` seeded
/// random unitary starts (ties to the lower start index).
DiagonalResult maximize_diagonal(const CMatrix& a, const DiagonalOptions& opts);

struct DistanceReport {
    CMatrix witness;  ///< normal T, diagonal in `basis`
    CMatrix basis;
    std::map<double, double> distances;     ///< ||A - T||_p
    double frobenius_exact = 0;             ///< off-diagonal mass of U* A U at the optimum found
    std::map<double, double> lower_bounds;  ///< ||[A*,A]||_p / (4 ||A||)
    int sweeps = 0;
    std::vector<double> objective_history;
    bool converged = false;
    double witness_defect = 0;
};

DistanceReport nearest_normal(const CMatrix& a, const std::vector<double>& ps,
                              const DiagonalOptions& opts);

/// ||[A*,A]||_p / (4 ||A||), 0 for A = 0.
double commutator_lower_bound(const CMatrix& a, double p);

} // namespace nearnormal
