#include "nearnormal/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nearnormal/errors.hpp"

namespace nearnormal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_disc(const Region& r, const char* what)
{
    if (r.kind() != Region::Kind::disc)
        throw std::invalid_argument(std::string(what) + ": region must be a disc");
}

// Exit point of the ray anchor + t*dir (t > 0) from the circle; anchor is inside.
Complex ray_exit(Complex center, double radius, Complex anchor, Complex dir)
{
    const Complex p = anchor - center;
    const double b = std::real(std::conj(dir) * p);
    const double c = std::norm(p) - radius * radius;
    const double t = -b + std::sqrt(b * b - c);
    const Complex w = p + t * dir;
    return center + w * (radius / std::abs(w));
}

Complex push(const BoundaryPush& m, Complex z)
{
    if (!(std::abs(z - m.center) < m.radius))
        return z;
    const Complex off = z - m.anchor;
    const double len = std::abs(off);
    const Complex dir = len == 0.0 ? Complex(1.0, 0.0) : off / len;
    return ray_exit(m.center, m.radius, m.anchor, dir);
}

Complex snap(const ChordSnap& m, Complex z)
{
    if (!(std::abs(z - m.center) < m.radius))
        return z;
    return std::abs(z - m.minus) < std::abs(z - m.plus) ? m.minus : m.plus;
}

double distance_to_segment(Complex z, Complex a, Complex b)
{
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0)
        return std::abs(z - a);
    const double t = std::clamp(std::real(std::conj(ab) * (z - a)) / len2, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

SurgeryResult finish(const SpectralDecomp& d, CVector values, std::vector<Eigen::Index> moved,
                     double bound)
{
    SurgeryResult r;
    r.spectrum = SpectralDecomp{std::move(values), d.basis};
    r.output = r.spectrum.reconstruct();
    r.moved = std::move(moved);
    r.moved_count = static_cast<Eigen::Index>(r.moved.size());
    r.perturbation_norm = r.moved.empty() ? 0.0 : operator_norm(d.reconstruct() - r.output);
    r.bound = bound;
    return r;
}

} // namespace

PlaneMap radial_collapse(const Region& disc)
{
    require_disc(disc, "radial_collapse");
    return RadialCollapse{disc.center(), disc.size()};
}

PlaneMap affine(Complex a, Complex b)
{
    if (a == Complex(0.0, 0.0))
        throw std::invalid_argument("affine: slope must be nonzero");
    return Affine{a, b};
}

PlaneMap boundary_push(const Region& disc, Complex anchor)
{
    require_disc(disc, "boundary_push");
    if (!disc.contains(anchor))
        throw std::invalid_argument("boundary_push: anchor " + format_complex(anchor) +
                                    " is not inside the disc");
    return BoundaryPush{disc.center(), disc.size(), anchor};
}

PlaneMap chord_snap(const Region& disc, Complex minus, Complex plus)
{
    require_disc(disc, "chord_snap");
    const double slack = 1e-9 * disc.size();
    for (Complex e : {minus, plus})
        if (std::abs(std::abs(e - disc.center()) - disc.size()) > slack)
            throw std::invalid_argument("chord_snap: endpoint " + format_complex(e) +
                                        " is not on the circle");
    if (minus == plus)
        throw std::invalid_argument("chord_snap: chord endpoints coincide");
    return ChordSnap{disc.center(), disc.size(), minus, plus};
}

Complex apply(const PlaneMap& map, Complex z)
{
    return std::visit(
        overloaded{
            [z](const RadialCollapse& m) {
                const Complex off = z - m.center;
                const double len = std::abs(off);
                return len <= m.radius ? z : m.center + off * (m.radius / len);
            },
            [z](const Affine& m) { return m.a * z + m.b; },
            [z](const BoundaryPush& m) { return push(m, z); },
            [z](const ChordSnap& m) { return snap(m, z); },
        },
        map);
}

SpectralDecomp transport_spectrum(const SpectralDecomp& d, const PlaneMap& map)
{
    CVector values(d.dim());
    for (Eigen::Index k = 0; k < d.dim(); ++k)
        values[k] = apply(map, d.eigenvalues[k]);
    return {std::move(values), d.basis};
}

CMatrix transport(const SpectralDecomp& d, const PlaneMap& map)
{
    return transport_spectrum(d, map).reconstruct();
}

SurgeryResult remove_region(const SpectralDecomp& d, const Region& disc, Complex anchor)
{
    const auto map = std::get<BoundaryPush>(boundary_push(disc, anchor));
    CVector values = d.eigenvalues;
    std::vector<Eigen::Index> moved;
    for (Eigen::Index k = 0; k < d.dim(); ++k) {
        if (disc.contains(values[k])) {
            values[k] = push(map, values[k]);
            moved.push_back(k);
        }
    }
    return finish(d, std::move(values), std::move(moved), 2.0 * disc.size());
}

SurgeryResult remove_arc(const SpectralDecomp& d, const Region& disc, Complex minus, Complex plus,
                         double chord_tol)
{
    const auto map = std::get<ChordSnap>(chord_snap(disc, minus, plus));
    const double slack = chord_tol * disc.diameter();
    CVector values = d.eigenvalues;
    std::vector<Eigen::Index> moved;
    for (Eigen::Index k = 0; k < d.dim(); ++k) {
        if (!disc.contains(values[k]))
            continue;
        if (distance_to_segment(values[k], minus, plus) > slack)
            throw SpectrumOffContour(values[k]);
        values[k] = snap(map, values[k]);
        moved.push_back(k);
    }
    return finish(d, std::move(values), std::move(moved), 2.0 * disc.size());
}

Oscillator::Oscillator(double eps, double r) : eps_(eps), r_(r)
{
    if (!(eps > 0.0) || !(r > 0.0) || !std::isfinite(eps) || !std::isfinite(r))
        throw std::invalid_argument("oscillator: eps and r must be positive");
}

double Oscillator::operator()(double x) const
{
    return amplitude() * std::cos(2.0 * std::numbers::pi * x / eps_);
}

namespace {

// Root of f(t) = y on [a, b] where f is monotone; nullopt when not bracketed.
std::optional<double> monotone_root(const std::function<double(double)>& f, double a, double b,
                                    double y, double tol)
{
    double ga = f(a) - y;
    double gb = f(b) - y;
    if (std::abs(ga) <= tol)
        return a;
    if (std::abs(gb) <= tol)
        return b;
    if ((ga > 0) == (gb > 0))
        return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        const double gm = f(mid) - y;
        if (gm == 0.0)
            return mid;
        if ((gm > 0) == (ga > 0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
            gb = gm;
        }
    }
    return std::abs(ga) <= std::abs(gb) ? a : b;
}

} // namespace

double nearest_level_point(const Oscillator& f, double x, double y)
{
    const double amp = f.amplitude();
    if (std::abs(y) > amp)
        throw std::invalid_argument("nearest_level_point: level outside the oscillation range");
    const double h = f.half_period();
    const double tol = 1e-14 * amp;
    const auto k = std::floor(x / h);
    const std::function<double(double)> fn = [&f](double t) { return f(t); };

    double best = 0.0;
    bool found = false;
    for (double j : {k, k - 1.0, k + 1.0}) {
        const double a = std::max(j * h, -amp);
        const double b = std::min((j + 1.0) * h, amp);
        if (!(a < b))
            continue;
        const auto t = monotone_root(fn, a, b, y, tol);
        if (t && (!found || std::abs(*t - x) < std::abs(best - x))) {
            best = *t;
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("nearest_level_point: no solution near x");
    return best;
}

double check_oscillator(const std::function<double(double)>& f, double eps, double r)
{
    if (!(eps > 0.0) || !(r > 0.0))
        throw std::invalid_argument("check_oscillator: eps and r must be positive");
    const double amp = r + eps;
    const double lo = -amp;
    const double hi = amp;

    // Sample finely, locate extrema, and split the domain into monotone pieces.
    const double step = std::min(eps / 64.0, (hi - lo) / 4096.0);
    const auto samples = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    std::vector<double> xs(samples + 1);
    std::vector<double> fs(samples + 1);
    for (std::size_t i = 0; i <= samples; ++i) {
        xs[i] = i == samples ? hi : lo + static_cast<double>(i) * step;
        fs[i] = f(xs[i]);
    }

    std::vector<double> breaks{lo};
    for (std::size_t i = 1; i < samples; ++i) {
        const double left = fs[i] - fs[i - 1];
        const double right = fs[i + 1] - fs[i];
        if (left * right > 0.0)
            continue;
        // Refine the extremum on [x_{i-1}, x_{i+1}] by golden-section search.
        const bool is_max = left > 0.0 || right < 0.0;
        double a = xs[i - 1];
        double b = xs[i + 1];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60 && b - a > 1e-15 * amp; ++it) {
            const double c = b - g * (b - a);
            const double d = a + g * (b - a);
            const bool keep_left = is_max ? f(c) >= f(d) : f(c) <= f(d);
            (keep_left ? b : a) = keep_left ? d : c;
        }
        const double x = 0.5 * (a + b);
        if (x > breaks.back())
            breaks.push_back(x);
    }
    if (hi > breaks.back())
        breaks.push_back(hi);

    const double tol = 1e-12 * amp;
    const double ystep = eps / 100.0;
    const auto levels = static_cast<std::size_t>(std::floor(2.0 * amp / ystep + 1e-9));
    double worst = 0.0;
    std::vector<double> roots;
    for (std::size_t l = 0; l <= levels; ++l) {
        const double y = std::min(lo + static_cast<double>(l) * ystep, hi);
        const double half = std::sqrt(std::max(0.0, amp * amp - y * y));

        roots.clear();
        for (std::size_t p = 0; p + 1 < breaks.size(); ++p)
            if (const auto t = monotone_root(f, breaks[p], breaks[p + 1], y, tol))
                roots.push_back(*t);
        if (roots.empty())
            return kNoNet;
        std::sort(roots.begin(), roots.end());

        // The distance to the root set is piecewise linear: its maximum over
        // [-half, half] sits at an endpoint or at a midpoint between roots.
        auto dist = [&roots](double x) {
            const auto it = std::lower_bound(roots.begin(), roots.end(), x);
            double d = kNoNet;
            if (it != roots.end())
                d = *it - x;
            if (it != roots.begin())
                d = std::min(d, x - *(it - 1));
            return d;
        };
        double level = std::max(dist(-half), dist(half));
        for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
            const double mid = 0.5 * (roots[i] + roots[i + 1]);
            if (mid > -half && mid < half)
                level = std::max(level, 0.5 * (roots[i + 1] - roots[i]));
        }
        worst = std::max(worst, level);
        if (worst >= eps)
            return kNoNet;
    }
    return worst;
}

GraphApprox graph_normal_approx(const SpectralDecomp& d, double eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("graph_normal_approx: eps must be positive");
    GraphApprox g;
    const Eigen::Index n = d.dim();
    g.radius = n == 0 ? 0.0 : d.eigenvalues.cwiseAbs().maxCoeff();
    g.bound = 2.0 * eps + eps * (1.0 + g.radius);
    if (g.radius == 0.0) {
        g.spectrum = SpectralDecomp{CVector::Zero(n), d.basis};
        g.output = CMatrix::Zero(n, n);
        return g;
    }

    const Oscillator f(eps, g.radius);
    const double amp = f.amplitude();
    g.scale = g.radius / amp;
    CVector values(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = d.eigenvalues[k].real();
        const double y = std::clamp(d.eigenvalues[k].imag(), -amp, amp);
        const double t = nearest_level_point(f, x, y);
        g.max_shift = std::max(g.max_shift, std::abs(t - x));
        values[k] = g.scale * Complex(t, f(t));
    }
    g.spectrum = SpectralDecomp{std::move(values), d.basis};
    g.output = g.spectrum.reconstruct();
    g.perturbation_norm = operator_norm(d.reconstruct() - g.output);
    g.normality_defect = normality_defect(g.output);
    return g;
}

} // namespace nearnormal
