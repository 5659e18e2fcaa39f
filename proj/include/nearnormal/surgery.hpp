#pragma once

#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "nearnormal/linalg.hpp"
#include "nearnormal/partition.hpp"

namespace nearnormal {

// Maps of the plane applied to a normal matrix through its eigenvalues.

/// Fixes the closed disc and sends z outside it to center + radius (z - center)/|z - center|.
struct RadialCollapse {
    Complex center;
    double radius;
};

/// z -> a z + b, a != 0.
struct Affine {
    Complex a;
    Complex b;
};

/// Identity off the open disc; inside it, the point where the ray from the
/// anchor through z leaves the disc. The anchor itself goes along +1.
struct BoundaryPush {
    Complex center;
    double radius;
    Complex anchor;
};

/// Identity off the open disc; inside it, the nearer chord endpoint (ties go to plus).
struct ChordSnap {
    Complex center;
    double radius;
    Complex minus;
    Complex plus;
};

using PlaneMap = std::variant<RadialCollapse, Affine, BoundaryPush, ChordSnap>;

PlaneMap radial_collapse(const Region& disc);
PlaneMap affine(Complex a, Complex b);
PlaneMap boundary_push(const Region& disc, Complex anchor);
PlaneMap chord_snap(const Region& disc, Complex minus, Complex plus);

Complex apply(const PlaneMap& map, Complex z);

/// phi(A) = U diag(phi(lambda)) U*.
CMatrix transport(const SpectralDecomp& d, const PlaneMap& map);
/// Same eigenbasis, mapped eigenvalues.
SpectralDecomp transport_spectrum(const SpectralDecomp& d, const PlaneMap& map);

struct SurgeryResult {
    CMatrix output;
    SpectralDecomp spectrum;       ///< eigendecomposition of output (basis shared with input)
    std::vector<Eigen::Index> moved;
    Eigen::Index moved_count = 0;
    double perturbation_norm = 0;  ///< ||A - A_Omega||
    double bound = 0;              ///< 2 * radius
};

/// Pushes the spectrum inside the disc onto its boundary along rays from
/// `anchor`. Eigenpairs outside the disc are left untouched.
SurgeryResult remove_region(const SpectralDecomp& d, const Region& disc, Complex anchor);

/// Snaps the spectrum inside the disc to the nearer endpoint of the chord
/// [minus, plus]. Every eigenvalue inside the disc must lie within
/// chord_tol * diam of the chord, otherwise SpectrumOffContour is thrown.
SurgeryResult remove_arc(const SpectralDecomp& d, const Region& disc, Complex minus, Complex plus,
                         double chord_tol = 1e-9);

/// f(x) = (r + eps) cos(2 pi x / eps) on [-(r + eps), r + eps].
class Oscillator {
public:
    Oscillator(double eps, double r);

    double operator()(double x) const;
    double eps() const noexcept { return eps_; }
    double r() const noexcept { return r_; }
    double amplitude() const noexcept { return r_ + eps_; }
    /// Interval [k eps/2, (k+1) eps/2] on which f is monotone.
    double half_period() const noexcept { return 0.5 * eps_; }

private:
    double eps_;
    double r_;
};

inline constexpr double kNoNet = std::numeric_limits<double>::infinity();

/// Estimates the smallest eps' such that, for every level y on a grid of
/// [-(r+eps), r+eps] with step eps/100, the solutions of f(x) = y form an
/// eps'-net of the disc slice {x : x^2 + y^2 <= (r+eps)^2}. Returns kNoNet
/// when eps' >= eps or some level has no solution.
double check_oscillator(const std::function<double(double)>& f, double eps, double r);

/// Solution of f(t) = y nearest to x, searched by bisection on the
/// half-period containing x and its two neighbours. y must lie in
/// [-amplitude, amplitude].
double nearest_level_point(const Oscillator& f, double x, double y);

struct GraphApprox {
    CMatrix output;
    SpectralDecomp spectrum;
    double radius = 0;          ///< r = ||A||
    double scale = 0;           ///< r / (r + eps)
    double max_shift = 0;       ///< max horizontal move |eps_k|
    double perturbation_norm = 0;
    double bound = 0;           ///< 2 eps + eps (1 + r)
    double normality_defect = 0;
};

/// Moves each eigenvalue horizontally onto the graph of Oscillator(eps, ||A||)
/// at its own height, then scales by r/(r+eps).
GraphApprox graph_normal_approx(const SpectralDecomp& d, double eps);

} // namespace nearnormal
