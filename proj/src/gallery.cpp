#include "nearnormal/gallery.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>

#include "nearnormal/random.hpp"

namespace nearnormal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string shortest(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

CMatrix shift_example(int m)
{
    if (m < 2 || m % 2 != 0)
        throw std::invalid_argument("m must be even");
    CMatrix a = CMatrix::Zero(m, m);
    for (int i = 0; i < m; i += 2)
        a(i, i + 1) = 1.0;
    return a;
}

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;

double partial_permutation_norm(const SparseC& a)
{
    std::vector<int> row_count(static_cast<std::size_t>(a.rows()), 0);
    std::vector<int> col_count(static_cast<std::size_t>(a.cols()), 0);
    double norm = 0.0;
    for (Eigen::Index j = 0; j < a.outerSize(); ++j)
        for (SparseC::InnerIterator it(a, j); it; ++it) {
            if (it.value() == Complex(0.0, 0.0))
                continue;
            if (++row_count[static_cast<std::size_t>(it.row())] > 1 ||
                ++col_count[static_cast<std::size_t>(it.col())] > 1)
                throw std::invalid_argument(
                    "generalized_permutation_norm: pattern is not a partial permutation");
            norm = std::max(norm, std::abs(it.value()));
        }
    return norm;
}

} // namespace

double generalized_permutation_norm(const CMatrix& a)
{
    require_square(a, "generalized_permutation_norm");
    return partial_permutation_norm(a.sparseView());
}

AlmostCommutingPair certify_almost_commuting_pair(CMatrix a, CMatrix b, int m)
{
    require_same_shape(a, b);
    require_square(a, "certify_almost_commuting_pair");
    AlmostCommutingPair p;
    // [A, B] is a weighted shift and [B*, B] is diagonal, so their norms are
    // entry maxima. Sparse products keep m = 512 cheap.
    const SparseC as = a.sparseView();
    const SparseC bs = b.sparseView();
    const SparseC bs_adj = bs.adjoint();
    p.norm_a = partial_permutation_norm(as);
    p.norm_b = partial_permutation_norm(bs);
    p.norm_ab = partial_permutation_norm(SparseC(as * bs - bs * as));
    p.norm_bb = partial_permutation_norm(SparseC(bs_adj * bs - bs * bs_adj));
    const double slack = 1e-12;
    const double inv = 1.0 / m;
    if (p.norm_a != 1.0 || p.norm_b > 1.0 + slack || p.norm_ab > 2.0 * inv + slack ||
        p.norm_bb > 4.0 * inv + slack) {
        std::ostringstream os;
        os.precision(17);
        os << "almost_commuting_pair(m=" << m << ") violates its bounds: |A|=" << p.norm_a
           << " |B|=" << p.norm_b << " |[A,B]|=" << p.norm_ab << " |[B*,B]|=" << p.norm_bb;
        throw std::logic_error(os.str());
    }
    p.a = std::move(a);
    p.b = std::move(b);
    return p;
}

AlmostCommutingPair almost_commuting_pair(int m)
{
    if (m < 1)
        throw std::invalid_argument("m must be at least 1");
    const int n = m + 1;
    CMatrix a = CMatrix::Zero(n, n);
    CMatrix b = CMatrix::Zero(n, n);
    for (int j = 0; j <= m; ++j)
        a(j, j) = 1.0 - 2.0 * j / m;
    for (int j = 0; j < m; ++j)
        b(j + 1, j) = 2.0 / (m + 1) * std::sqrt(static_cast<double>(j + 1) * (m - j));
    return certify_almost_commuting_pair(std::move(a), std::move(b), m);
}

RandomNormal random_normal(int dim, std::uint64_t seed)
{
    if (dim < 1)
        throw std::invalid_argument("dim must be positive");
    Rng rng(seed);
    RandomNormal r;
    r.eigenvalues.resize(dim);
    for (int k = 0; k < dim; ++k)
        r.eigenvalues[k] = uniform_in_disc(rng);
    r.basis = haar_unitary(dim, rng);
    r.matrix = r.basis * r.eigenvalues.asDiagonal() * r.basis.adjoint();
    return r;
}

CMatrix perturbed_normal(int dim, double delta, std::uint64_t seed)
{
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("delta must be non-negative");
    RandomNormal base = random_normal(dim, seed);
    // Offset stream so E is independent of N's draws for every delta.
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const CMatrix e = complex_gaussian(dim, dim, rng);
    CMatrix out = base.matrix + (delta / operator_norm(e)) * e;
    const double norm = operator_norm(out);
    if (norm > 1.0)
        out /= norm;
    return out;
}

LaurentWindow laurent_multiplication(const LaurentSymbol& coeffs, int window)
{
    if (window < 0)
        throw std::invalid_argument("window K must be non-negative");
    const int n = 2 * window + 1;
    LaurentWindow w;
    w.window = window;
    w.g = CMatrix::Zero(n, n);
    w.a = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        w.g(i, i) = std::abs(i - window);
    for (const auto& [offset, c] : coeffs) {
        if (std::abs(offset) > window)
            throw std::invalid_argument("symbol degree exceeds the window size");
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("non-finite symbol coefficient");
        for (int col = 0; col < n; ++col) {
            const int row = col + offset;
            if (row >= 0 && row < n)
                w.a(row, col) = c;
        }
        w.commutator_bound += std::abs(offset) * std::abs(c);
    }
    w.commutator_norm = operator_norm(commutator(w.g, w.a));
    return w;
}

LaurentSymbol shift_symbol() { return {{1, Complex(1.0, 0.0)}}; }

LaurentSymbol random_laurent_symbol(int degree, std::uint64_t seed)
{
    if (degree < 0)
        throw std::invalid_argument("symbol degree must be non-negative");
    Rng rng(seed);
    const CMatrix z = complex_gaussian(2 * degree + 1, 1, rng);
    const double total = z.cwiseAbs().sum();
    LaurentSymbol c;
    for (int k = -degree; k <= degree; ++k)
        c[k] = z(k + degree, 0) / total;
    return c;
}

CMatrix materialize(const EnsembleSpec& spec)
{
    return std::visit(overloaded{
                          [](const ShiftExampleSpec& s) { return shift_example(s.m); },
                          [](const AlmostCommutingSpec& s) { return almost_commuting_pair(s.m).b; },
                          [](const PerturbedNormalSpec& s) {
                              return perturbed_normal(s.dim, s.delta, s.seed);
                          },
                          [](const LaurentSpec& s) {
                              return laurent_multiplication(s.coeffs, s.window).a;
                          },
                      },
                      spec);
}

std::string describe(const EnsembleSpec& spec)
{
    std::ostringstream os;
    std::visit(overloaded{
                   [&os](const ShiftExampleSpec& s) { os << "shift:m=" << s.m; },
                   [&os](const AlmostCommutingSpec& s) { os << "pair:m=" << s.m; },
                   [&os](const PerturbedNormalSpec& s) {
                       os << "perturbed:dim=" << s.dim << ":delta=" << shortest(s.delta) << ":seed=" << s.seed;
                   },
                   [&os](const LaurentSpec& s) {
                       os << "laurent:K=" << s.window;
                       for (const auto& [k, c] : s.coeffs)
                           os << ":c" << k << "=" << shortest(c.real()) << "," << shortest(c.imag());
                   },
               },
               spec);
    return os.str();
}

} // namespace nearnormal
