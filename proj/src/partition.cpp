#include "nearnormal/partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "nearnormal/errors.hpp"

namespace nearnormal {

namespace {

constexpr double kInset = 1.0 - 1e-12;

std::vector<Complex> to_points(const CVector& v)
{
    return {v.data(), v.data() + v.size()};
}

CMatrix projector(const CMatrix& basis, const std::vector<Eigen::Index>& columns)
{
    const Eigen::Index n = basis.rows();
    if (columns.empty())
        return CMatrix::Zero(n, n);
    CMatrix u(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        u.col(static_cast<Eigen::Index>(c)) = basis.col(columns[c]);
    return hermitian_part(u * u.adjoint());
}

} // namespace

Region Region::disc(Complex center, double radius)
{
    if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(center.real()) ||
        !std::isfinite(center.imag()))
        throw std::invalid_argument("disc radius must be positive and finite");
    return {Kind::disc, center, radius};
}

Region Region::square(Complex center, double side)
{
    if (!(side > 0.0) || !std::isfinite(side) || !std::isfinite(center.real()) ||
        !std::isfinite(center.imag()))
        throw std::invalid_argument("square side must be positive and finite");
    return {Kind::square, center, side};
}

bool Region::contains(Complex z) const noexcept
{
    if (kind_ == Kind::disc)
        return std::abs(z - center_) < size_;
    const double half = 0.5 * size_;
    return std::abs(z.real() - center_.real()) < half && std::abs(z.imag() - center_.imag()) < half;
}

double Region::diameter() const noexcept
{
    return kind_ == Kind::disc ? 2.0 * size_ : size_ * std::sqrt(2.0);
}

Complex Region::clamp(Complex z) const noexcept
{
    if (kind_ == Kind::disc) {
        const double limit = size_ * kInset;
        const Complex off = z - center_;
        const double r = std::abs(off);
        return r < limit ? z : center_ + off * (limit / r);
    }
    const double half = 0.5 * size_ * kInset;
    const double re = std::clamp(z.real(), center_.real() - half, center_.real() + half);
    const double im = std::clamp(z.imag(), center_.imag() - half, center_.imag() + half);
    return {re, im};
}

int Cover::count_containing(Complex z) const noexcept
{
    int count = 0;
    for (const Region& r : regions)
        count += r.contains(z) ? 1 : 0;
    return count;
}

int Cover::multiplicity(std::span<const Complex> points) const noexcept
{
    int k = 0;
    for (Complex z : points)
        k = std::max(k, count_containing(z));
    return k;
}

std::optional<Complex> Cover::first_uncovered(std::span<const Complex> points) const noexcept
{
    for (Complex z : points)
        if (count_containing(z) == 0)
            return z;
    return std::nullopt;
}

double Cover::max_diameter() const noexcept
{
    double d = 0.0;
    for (const Region& r : regions)
        d = std::max(d, r.diameter());
    return d;
}

Cover square_cover(std::span<const Complex> points, double side)
{
    if (!(side > 0.0) || !std::isfinite(side))
        throw std::invalid_argument("square_cover: side must be positive");
    if (points.empty())
        throw std::invalid_argument("square_cover: no points to cover");

    const double step = 0.5 * side;
    std::set<std::pair<long long, long long>> cells;
    for (Complex z : points) {
        const auto i0 = static_cast<long long>(std::floor(z.real() / step));
        const auto j0 = static_cast<long long>(std::floor(z.imag() / step));
        bool covered = false;
        for (long long i = i0 - 1; i <= i0 + 2; ++i) {
            for (long long j = j0 - 1; j <= j0 + 2; ++j) {
                const Region sq = Region::square({i * step, j * step}, side);
                if (sq.contains(z)) {
                    cells.emplace(i, j);
                    covered = true;
                }
            }
        }
        if (!covered)
            throw std::logic_error("square_cover: lattice search missed a point");
    }

    Cover cover;
    cover.regions.reserve(cells.size());
    for (auto [i, j] : cells)
        cover.regions.push_back(Region::square({i * step, j * step}, side));
    return cover;
}

CMatrix spectral_projection(const SpectralDecomp& d, const Region& region)
{
    std::vector<Eigen::Index> columns;
    for (Eigen::Index k = 0; k < d.dim(); ++k)
        if (region.contains(d.eigenvalues[k]))
            columns.push_back(k);
    return projector(d.basis, columns);
}

ResolutionOfIdentity resolution_of_identity(const SpectralDecomp& d, const Cover& cover)
{
    const std::size_t m = cover.regions.size();
    std::vector<std::vector<Eigen::Index>> members(m);
    ResolutionOfIdentity r;
    r.cover = cover;
    r.assignment.resize(static_cast<std::size_t>(d.dim()));

    for (Eigen::Index k = 0; k < d.dim(); ++k) {
        const Complex lambda = d.eigenvalues[k];
        std::size_t j = 0;
        while (j < m && !cover.regions[j].contains(lambda))
            ++j;
        if (j == m)
            throw UncoveredSpectrum(lambda);
        members[j].push_back(k);
        r.assignment[static_cast<std::size_t>(k)] = static_cast<int>(j);
    }

    r.projections.reserve(m);
    r.labels.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        r.projections.push_back(projector(d.basis, members[j]));
        const Region& region = cover.regions[j];
        if (members[j].empty()) {
            r.labels.push_back(region.center());
            continue;
        }
        Complex centroid = 0.0;
        for (Eigen::Index k : members[j])
            centroid += d.eigenvalues[k];
        centroid /= static_cast<double>(members[j].size());
        r.labels.push_back(region.clamp(centroid));
    }
    return r;
}

ProjectionDefects projection_defects(const ResolutionOfIdentity& r)
{
    ProjectionDefects out;
    if (r.projections.empty())
        return out;
    const Eigen::Index n = r.projections.front().rows();
    CMatrix sum = -CMatrix::Identity(n, n);
    for (std::size_t i = 0; i < r.projections.size(); ++i) {
        const CMatrix& p = r.projections[i];
        sum += p;
        out.idempotent = std::max(out.idempotent, operator_norm(p * p - p));
        out.self_adjoint = std::max(out.self_adjoint, operator_norm(p.adjoint() - p));
        for (std::size_t j = 0; j < r.projections.size(); ++j)
            if (j != i)
                out.orthogonal = std::max(out.orthogonal, operator_norm(p * r.projections[j]));
    }
    out.sum_to_identity = operator_norm(sum);
    return out;
}

void set_labels(ResolutionOfIdentity& r, std::vector<Complex> labels)
{
    if (labels.size() != r.cover.regions.size())
        throw std::invalid_argument("set_labels: one label per region required");
    for (std::size_t j = 0; j < labels.size(); ++j)
        if (!r.cover.regions[j].contains(labels[j]))
            throw std::invalid_argument("set_labels: label " + format_complex(labels[j]) +
                                        " lies outside its region");
    r.labels = std::move(labels);
}

FiniteSpectrumApprox finite_spectrum_approx(const SpectralDecomp& d, const Cover& cover)
{
    return finite_spectrum_approx(d, resolution_of_identity(d, cover));
}

FiniteSpectrumApprox finite_spectrum_approx(const SpectralDecomp& d, ResolutionOfIdentity r)
{
    const Eigen::Index n = d.dim();
    FiniteSpectrumApprox out;
    out.approximant = CMatrix::Zero(n, n);
    for (std::size_t j = 0; j < r.projections.size(); ++j)
        out.approximant += r.labels[j] * r.projections[j];

    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex z = r.labels[static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(k)])];
        out.max_displacement = std::max(out.max_displacement, std::abs(d.eigenvalues[k] - z));
    }
    const std::vector<Complex> spectrum = to_points(d.eigenvalues);
    out.multiplicity = r.cover.multiplicity(spectrum);
    out.error_bound = std::sqrt(static_cast<double>(out.multiplicity)) * r.cover.max_diameter();
    out.error_actual = operator_norm(d.reconstruct() - out.approximant);
    out.resolution = std::move(r);
    return out;
}

} // namespace nearnormal
