#include "nearnormal/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nearnormal/errors.hpp"
#include "parallel.hpp"

namespace nearnormal {

namespace {

void require_sorted(std::span<const double> g)
{
    if (!std::is_sorted(g.begin(), g.end()))
        throw std::invalid_argument("eigenvalues of G must be sorted ascending");
}

// #{i : lo <= g_i < hi} for sorted g.
long count_in(std::span<const double> g, double lo, double hi)
{
    const auto first = std::lower_bound(g.begin(), g.end(), lo);
    const auto last = std::lower_bound(g.begin(), g.end(), hi);
    return last > first ? static_cast<long>(last - first) : 0L;
}

void write_comments(std::ostream& os, std::span<const std::string> comments)
{
    for (const std::string& c : comments)
        os << "# " << c << '\n';
}

} // namespace

TruncationModel make_truncation_model(std::vector<double> g, CMatrix a, double lambda_limit)
{
    require_square(a, "truncation model");
    require_finite(a, "truncation model");
    if (static_cast<Eigen::Index>(g.size()) != a.rows())
        throw std::invalid_argument("truncation model: G and A differ in dimension");
    require_sorted(g);
    TruncationModel m;
    m.g = std::move(g);
    m.a = std::move(a);
    m.lambda_limit = lambda_limit;
    m.norm_a = operator_norm(m.a);
    CMatrix ga = m.a;
    for (Eigen::Index j = 0; j < ga.cols(); ++j)
        for (Eigen::Index i = 0; i < ga.rows(); ++i)
            ga(i, j) *= m.g[static_cast<std::size_t>(i)] - m.g[static_cast<std::size_t>(j)];
    m.norm_commutator_ga = operator_norm(ga);
    return m;
}

TruncationModel laurent_truncation_model(const LaurentWindow& w)
{
    const Eigen::Index n = w.a.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&w](Eigen::Index x, Eigen::Index y) {
        return w.g(x, x).real() < w.g(y, y).real();
    });

    std::vector<double> g(static_cast<std::size_t>(n));
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = w.g(order[i], order[i]).real();
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = w.a(order[i], order[j]);
    }
    return make_truncation_model(std::move(g), std::move(a), 0.5 * w.window);
}

long count_below(std::span<const double> g, double lambda)
{
    return static_cast<long>(std::lower_bound(g.begin(), g.end(), lambda) - g.begin());
}

long max_unit_window(std::span<const double> g, double lambda)
{
    // N(mu) - N(mu - 1) counts g_j in [mu - 1, mu), a sum of indicators of
    // (g_j, g_j + 1] in mu; its sup over mu <= lambda sits at a right
    // endpoint g_j + 1 <= lambda or at lambda itself.
    long best = count_in(g, lambda - 1.0, lambda);
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (j > 0 && g[j] == g[j - 1])
            continue;
        if (g[j] + 1.0 > lambda)
            break;
        best = std::max(best, count_in(g, g[j], g[j] + 1.0));
    }
    return best;
}

CountingReport counting_functions(std::span<const double> g, std::span<const double> lambda_grid)
{
    require_sorted(g);
    CountingReport r;
    r.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
    for (double lambda : lambda_grid) {
        r.n.push_back(count_below(g, lambda));
        r.n1.push_back(max_unit_window(g, lambda));
    }
    return r;
}

CMatrix truncate(const TruncationModel& model, double lambda)
{
    const long n = count_below(model.g, lambda);
    if (n == 0)
        throw EmptyTruncation(lambda);
    return model.a.topLeftCorner(n, n);
}

TruncationCheck verify_truncation_bounds(const TruncationModel& model, double lambda)
{
    if (lambda > model.lambda_limit)
        throw std::invalid_argument("lambda " + format_double(lambda) +
                                    " lies beyond the edge guard " +
                                    format_double(model.lambda_limit));
    const CMatrix a_lambda = truncate(model, lambda);
    TruncationCheck c;
    c.lambda = lambda;
    c.n = count_below(model.g, lambda);
    c.n1 = max_unit_window(model.g, lambda);

    const Eigen::Index dim = model.a.rows();
    const Eigen::Index rest = dim - c.n;
    c.lhs2_a = model.a.bottomLeftCorner(rest, c.n).squaredNorm();
    c.lhs2_a_adj = model.a.topRightCorner(c.n, rest).squaredNorm();

    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double a2 = model.norm_a * model.norm_a;
    const double ga2 = model.norm_commutator_ga * model.norm_commutator_ga;
    const auto n1 = static_cast<double>(c.n1);
    c.rhs2 = (a2 + pi2 / 6.0 * ga2) * n1;
    c.rhs3 = (2.0 * a2 + pi2 / 3.0 * ga2) * n1;
    c.lhs3 = schatten_norm(self_commutator(a_lambda), 1.0);

    auto holds = [](double lhs, double rhs) { return lhs <= rhs + 1e-9 * std::max(1.0, rhs); };
    c.pass = holds(c.lhs2_a, c.rhs2) && holds(c.lhs2_a_adj, c.rhs2) && holds(c.lhs3, c.rhs3);
    return c;
}

std::vector<ScalingRow> truncation_scaling(const TruncationModel& model,
                                           std::span<const double> lambda_grid,
                                           const DiagonalOptions& opts)
{
    std::vector<ScalingRow> rows;
    rows.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        ScalingRow row;
        row.check = verify_truncation_bounds(model, lambda);
        const DistanceReport nn = nearest_normal(truncate(model, lambda), {1.0}, opts);
        row.dist1_witness = nn.distances.at(1.0);
        row.dist1_over_n = row.dist1_witness / static_cast<double>(row.check.n);
        rows.push_back(row);
    }
    return rows;
}

double GridSpec::step() const
{
    return resolution > 1 ? 2.0 * half_width / (resolution - 1) : 0.0;
}

Complex GridSpec::point(int row, int col) const
{
    const double h = step();
    return center + Complex(-half_width + col * h, -half_width + row * h);
}

GridSpec default_grid(const CMatrix& a, double eps, int resolution)
{
    GridSpec g;
    g.resolution = resolution;
    g.half_width = operator_norm(a) + eps;
    return g;
}

double shifted_sigma_min(const CMatrix& a, Complex z)
{
    const CMatrix shifted = a - z * CMatrix::Identity(a.rows(), a.cols());
    const RVector s = singular_values(shifted);
    return s.size() == 0 ? 0.0 : s.minCoeff();
}

PseudospectrumReport pseudospectrum(const CMatrix& a, double eps, const GridSpec& grid,
                                    std::span<const Complex> reference, int threads)
{
    require_square(a, "pseudospectrum");
    require_finite(a, "pseudospectrum");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("pseudospectrum: eps must be positive");
    if (grid.resolution < 2 || !(grid.half_width > 0.0))
        throw std::invalid_argument("pseudospectrum: grid needs resolution >= 2 and positive half-width");
    const double reach = operator_norm(a) + eps;
    const double slack = 1e-12 * reach;
    if (grid.center.real() - grid.half_width > -reach + slack ||
        grid.center.real() + grid.half_width < reach - slack ||
        grid.center.imag() - grid.half_width > -reach + slack ||
        grid.center.imag() + grid.half_width < reach - slack)
        throw std::invalid_argument("pseudospectrum: grid does not cover the disc of radius ||A|| + eps");

    const int res = grid.resolution;
    std::vector<double> sigma(grid.size());
    detail::parallel_for(static_cast<std::size_t>(res), threads, [&](std::size_t row) {
        for (int col = 0; col < res; ++col)
            sigma[row * static_cast<std::size_t>(res) + static_cast<std::size_t>(col)] =
                shifted_sigma_min(a, grid.point(static_cast<int>(row), col));
    });

    PseudospectrumReport r;
    r.epsilon = eps;
    r.grid = grid;
    for (int row = 0; row < res; ++row)
        for (int col = 0; col < res; ++col) {
            const double s = sigma[static_cast<std::size_t>(row) * res + static_cast<std::size_t>(col)];
            if (s < eps) {
                r.members.push_back(grid.point(row, col));
                r.member_sigma_min.push_back(s);
            }
        }

    if (r.members.empty())
        r.d_eps = 0.0;
    else if (reference.empty())
        r.d_eps = std::numeric_limits<double>::infinity();
    else
        for (Complex z : r.members) {
            double nearest = std::numeric_limits<double>::infinity();
            for (Complex w : reference)
                nearest = std::min(nearest, std::abs(z - w));
            r.d_eps = std::max(r.d_eps, nearest);
        }
    return r;
}

std::vector<ScatterRow> f_scatter(const std::vector<EnsembleSpec>& ensemble,
                                  const DiagonalOptions& opts, int threads)
{
    std::vector<ScatterRow> rows(ensemble.size());
    detail::parallel_for(ensemble.size(), threads, [&](std::size_t i) {
        CMatrix a = materialize(ensemble[i]);
        const double norm = operator_norm(a);
        if (norm > 1.0)
            a /= norm;
        const CMatrix c = self_commutator(a);
        ScatterRow& row = rows[i];
        row.label = describe(ensemble[i]);
        row.dim = static_cast<long>(a.rows());
        row.defect = operator_norm(c);
        row.defect_frob = frobenius_norm(c);
        const DistanceReport nn = nearest_normal(a, {2.0, kOperatorNorm}, opts);
        row.dist_op_witness = nn.distances.at(kOperatorNorm);
        row.dist_frob_exact = nn.frobenius_exact;
        row.lower_bound_op = row.defect / 4.0;
        row.frob_ratio = safe_ratio(row.dist_frob_exact, row.defect_frob);
        if (row.dist_op_witness < row.lower_bound_op - 1e-9)
            throw std::logic_error("f_scatter: commutator lower bound violated for " + row.label);
    });
    return rows;
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_truncation_csv(std::ostream& os, std::span<const ScalingRow> rows,
                          std::span<const std::string> comments)
{
    write_comments(os, comments);
    os << "lambda,N,N1,lhs2_A,lhs2_Astar,rhs2,lhs3,rhs3,pass,dist1_witness,dist1_over_N\n";
    for (const ScalingRow& r : rows) {
        const TruncationCheck& c = r.check;
        os << format_double(c.lambda) << ',' << c.n << ',' << c.n1 << ','
           << format_double(c.lhs2_a) << ',' << format_double(c.lhs2_a_adj) << ','
           << format_double(c.rhs2) << ',' << format_double(c.lhs3) << ','
           << format_double(c.rhs3) << ',' << (c.pass ? "true" : "false") << ','
           << format_double(r.dist1_witness) << ',' << format_double(r.dist1_over_n) << '\n';
    }
}

void write_pseudospectrum_csv(std::ostream& os, const PseudospectrumReport& report,
                              std::span<const std::string> comments)
{
    write_comments(os, comments);
    os << "# epsilon: " << format_double(report.epsilon) << '\n'
       << "# grid_points: " << report.grid.size() << '\n'
       << "# members: " << report.members.size() << '\n'
       << "# d_eps: " << format_double(report.d_eps) << '\n';
    os << "re,im,sigma_min\n";
    for (std::size_t i = 0; i < report.members.size(); ++i)
        os << format_double(report.members[i].real()) << ','
           << format_double(report.members[i].imag()) << ','
           << format_double(report.member_sigma_min[i]) << '\n';
}

void write_scatter_csv(std::ostream& os, std::span<const ScatterRow> rows,
                       std::span<const std::string> comments)
{
    write_comments(os, comments);
    os << "label,dim,defect,defect_frob,dist_op_witness,dist_frob_exact,lower_bound_op,frob_ratio\n";
    for (const ScatterRow& r : rows)
        os << r.label << ',' << r.dim << ',' << format_double(r.defect) << ','
           << format_double(r.defect_frob) << ',' << format_double(r.dist_op_witness) << ','
           << format_double(r.dist_frob_exact) << ',' << format_double(r.lower_bound_op) << ','
           << format_double(r.frob_ratio) << '\n';
}

} // namespace nearnormal
