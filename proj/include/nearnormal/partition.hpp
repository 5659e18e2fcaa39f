#pragma once

#include <optional>
#include <vector>

#include "nearnormal/linalg.hpp"

namespace nearnormal {

/// Open disc or open axis-aligned square in the complex plane.
class Region {
public:
    enum class Kind { disc, square };

    static Region disc(Complex center, double radius);
    static Region square(Complex center, double side);

    Kind kind() const noexcept { return kind_; }
    Complex center() const noexcept { return center_; }
    /// Radius for discs, side length for squares.
    double size() const noexcept { return size_; }

    /// Strict interior test.
    bool contains(Complex z) const noexcept;
    double diameter() const noexcept;
    /// Nearest point of the region to z, pulled a relative 1e-12 inside the boundary.
    Complex clamp(Complex z) const noexcept;

private:
    Region(Kind kind, Complex center, double size) : kind_(kind), center_(center), size_(size) {}

    Kind kind_;
    Complex center_;
    double size_;
};

struct Cover {
    std::vector<Region> regions;

    /// Number of regions containing z.
    int count_containing(Complex z) const noexcept;
    /// Maximum of count_containing over the points (0 for no points).
    int multiplicity(std::span<const Complex> points) const noexcept;
    /// First point covered by no region, if any.
    std::optional<Complex> first_uncovered(std::span<const Complex> points) const noexcept;
    double max_diameter() const noexcept;
};

/// Squares of the given side centred on the lattice (side/2) Z^2, keeping
/// those that contain at least one point. Every point lies in 1..4 squares.
Cover square_cover(std::span<const Complex> points, double side);

struct ResolutionOfIdentity {
    std::vector<CMatrix> projections;
    std::vector<Complex> labels;
    /// Region index each eigenvalue was assigned to, in decomposition order.
    std::vector<int> assignment;
    Cover cover;
};

/// Orthogonal projection onto the eigenvectors whose eigenvalue lies in the region.
CMatrix spectral_projection(const SpectralDecomp& d, const Region& region);

/// Each eigenvalue goes to the first region (in cover order) containing it.
/// Labels default to the centroid of the assigned eigenvalues clamped into
/// the region, or the region centre when nothing is assigned. Throws
/// UncoveredSpectrum.
ResolutionOfIdentity resolution_of_identity(const SpectralDecomp& d, const Cover& cover);

/// Operator-norm residuals of the projection identities.
struct ProjectionDefects {
    double sum_to_identity = 0;  ///< ||sum_j P_j - I||
    double idempotent = 0;       ///< max_j ||P_j^2 - P_j||
    double self_adjoint = 0;     ///< max_j ||P_j* - P_j||
    double orthogonal = 0;       ///< max_{i != j} ||P_i P_j||
};

ProjectionDefects projection_defects(const ResolutionOfIdentity& r);

/// Replaces the labels, which must lie inside their regions.
void set_labels(ResolutionOfIdentity& r, std::vector<Complex> labels);

struct FiniteSpectrumApprox {
    CMatrix approximant;      ///< sum_j z_j P_j
    double error_bound = 0;   ///< sqrt(k) * max diam, k evaluated on the spectrum
    double error_actual = 0;  ///< ||A - T|| in the operator norm
    double max_displacement = 0;  ///< max_k |lambda_k - z_j(k)|
    int multiplicity = 0;
    ResolutionOfIdentity resolution;
};

FiniteSpectrumApprox finite_spectrum_approx(const SpectralDecomp& d, const Cover& cover);
FiniteSpectrumApprox finite_spectrum_approx(const SpectralDecomp& d, ResolutionOfIdentity r);

} // namespace nearnormal
