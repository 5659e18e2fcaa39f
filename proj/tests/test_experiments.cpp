#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nearnormal/errors.hpp"
#include "nearnormal/experiments.hpp"
#include "support.hpp"

using namespace nearnormal;

namespace {

// g on the lattice Z/64 so that every window endpoint is exact in binary.
std::vector<double> lattice_values(std::uint64_t seed, int count)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 64 * 6);
    std::vector<double> g;
    for (int i = 0; i < count; ++i)
        g.push_back(pick(rng) / 64.0);
    std::sort(g.begin(), g.end());
    return g;
}

long brute_count(const std::vector<double>& g, double lambda)
{
    long n = 0;
    for (double x : g)
        n += x < lambda ? 1 : 0;
    return n;
}

// N(mu) is constant on (b, b'] between lattice breakpoints, so sampling every
// multiple of 1/128 up to lambda visits every value of N(mu) - N(mu - 1).
long brute_unit_window(const std::vector<double>& g, double lambda)
{
    long best = 0;
    for (int k = -256; k / 128.0 <= lambda; ++k) {
        const double mu = k / 128.0;
        best = std::max(best, brute_count(g, mu) - brute_count(g, mu - 1.0));
    }
    return std::max(best, brute_count(g, lambda) - brute_count(g, lambda - 1.0));
}

TruncationModel random_symbol_model(int window, std::uint64_t seed)
{
    return laurent_truncation_model(laurent_multiplication(random_laurent_symbol(2, seed), window));
}

} // namespace

TEST(Counting, MatchesBruteForceOnLattice)
{
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto g = lattice_values(seed, 25);
        for (int k = 0; k <= 7 * 64; k += 5) {
            const double lambda = k / 64.0;
            EXPECT_EQ(count_below(g, lambda), brute_count(g, lambda));
            EXPECT_EQ(max_unit_window(g, lambda), brute_unit_window(g, lambda))
                << "seed " << seed << " lambda " << lambda;
        }
    }
}

TEST(Counting, LaurentGivesPairs)
{
    const TruncationModel m = laurent_truncation_model(laurent_multiplication(shift_symbol(), 8));
    EXPECT_EQ(count_below(m.g, 0.5), 1);
    EXPECT_EQ(count_below(m.g, 3.0), 5);
    EXPECT_EQ(max_unit_window(m.g, 3.0), 2);
    EXPECT_EQ(max_unit_window(m.g, 0.5), 1);
    EXPECT_DOUBLE_EQ(m.lambda_limit, 4.0);
}

TEST(Counting, ReportAndUnsortedInput)
{
    const std::vector<double> g = {0.0, 0.5, 2.0};
    const std::vector<double> grid = {0.25, 1.0, 3.0};
    const CountingReport r = counting_functions(g, grid);
    EXPECT_EQ(r.n, (std::vector<long>{1, 2, 3}));
    EXPECT_EQ(r.n1, (std::vector<long>{1, 2, 2}));
    const std::vector<double> bad = {1.0, 0.0};
    EXPECT_THROW(counting_functions(bad, grid), std::invalid_argument);
}

TEST(TruncationModel, CommutatorNormMatchesDense)
{
    const LaurentWindow w = laurent_multiplication(random_laurent_symbol(3, 7), 9);
    const TruncationModel m = laurent_truncation_model(w);
    EXPECT_NEAR(m.norm_commutator_ga, operator_norm(commutator(w.g, w.a)), 1e-12);
    EXPECT_NEAR(m.norm_a, operator_norm(w.a), 1e-12);
    for (std::size_t i = 1; i < m.g.size(); ++i)
        EXPECT_LE(m.g[i - 1], m.g[i]);
}

TEST(Truncation, ShiftSymbolClosedForms)
{
    for (int window : {16, 32}) {
        const TruncationModel m = laurent_truncation_model(laurent_multiplication(shift_symbol(), window));
        for (double lambda = 0.5; lambda <= window / 2.0; lambda += 0.5) {
            const TruncationCheck c = verify_truncation_bounds(m, lambda);
            EXPECT_TRUE(c.pass);
            EXPECT_NEAR(c.lhs3, c.n > 1 ? 2.0 : 0.0, 1e-12) << lambda;
            if (c.n > 1)
                EXPECT_NEAR(c.rhs3, (2.0 + std::numbers::pi * std::numbers::pi / 3.0) * 2.0, 1e-12);
            EXPECT_NEAR(c.lhs2_a, 1.0, 1e-15);
            EXPECT_NEAR(c.lhs2_a_adj, 1.0, 1e-15);
        }
    }
}

TEST(Truncation, RandomSymbolsSatisfyInequalities)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const TruncationModel m = random_symbol_model(20, seed);
        for (double lambda = 0.5; lambda <= 10.0; lambda += 0.5) {
            const TruncationCheck c = verify_truncation_bounds(m, lambda);
            EXPECT_TRUE(c.pass) << "seed " << seed << " lambda " << lambda;
            EXPECT_LE(c.lhs3, c.rhs3);
        }
    }
}

TEST(Truncation, GuardAndEmptyTruncation)
{
    const TruncationModel m = laurent_truncation_model(laurent_multiplication(shift_symbol(), 8));
    EXPECT_THROW(verify_truncation_bounds(m, 4.5), std::invalid_argument);
    EXPECT_THROW(verify_truncation_bounds(m, 0.0), EmptyTruncation);
    EXPECT_THROW(truncate(m, -1.0), EmptyTruncation);
    EXPECT_EQ(truncate(m, 2.0).rows(), 3);
}

TEST(Truncation, ScalingRowsAndCsv)
{
    const TruncationModel m = laurent_truncation_model(laurent_multiplication(shift_symbol(), 16));
    const std::vector<double> grid = {4.0, 8.0};
    const auto rows = truncation_scaling(m, grid, {});
    ASSERT_EQ(rows.size(), 2u);
    for (const ScalingRow& r : rows) {
        EXPECT_GT(r.dist1_witness, 0.0);
        EXPECT_NEAR(r.dist1_over_n, r.dist1_witness / r.check.n, 1e-15);
    }
    std::ostringstream os;
    const std::vector<std::string> comments = {"hello"};
    write_truncation_csv(os, rows, comments);
    const std::string text = os.str();
    EXPECT_EQ(text.rfind("# hello\nlambda,N,N1,", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);

    std::ostringstream empty;
    write_truncation_csv(empty, truncation_scaling(m, {}, {}));
    const std::string header_only = empty.str();
    EXPECT_EQ(std::count(header_only.begin(), header_only.end(), '\n'), 1);
}

TEST(Pseudospectrum, NormalMatrixIsEpsNeighbourhood)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const RandomNormal rn = random_normal(4, seed);
        const double eps = 0.15;
        const GridSpec grid = default_grid(rn.matrix, eps, 61);
        const PseudospectrumReport r = pseudospectrum(rn.matrix, eps, grid, {}, 2);
        std::size_t expected = 0;
        for (int row = 0; row < grid.resolution; ++row)
            for (int col = 0; col < grid.resolution; ++col) {
                const Complex z = grid.point(row, col);
                double d = 1e300;
                for (Eigen::Index k = 0; k < 4; ++k)
                    d = std::min(d, std::abs(z - rn.eigenvalues(k)));
                expected += d < eps ? 1 : 0;
                EXPECT_NEAR(shifted_sigma_min(rn.matrix, z), d, 1e-12);
            }
        EXPECT_EQ(r.members.size(), expected);
    }
}

TEST(Pseudospectrum, SigmaMinMatchesGramEigenvalue)
{
    const CMatrix a = testsupport::random_contraction(5, 3);
    const Complex z(0.1, -0.2);
    const CMatrix s = a - z * CMatrix::Identity(5, 5);
    const HermitianEig e = hermitian_eig(hermitian_part(s.adjoint() * s));
    EXPECT_NEAR(shifted_sigma_min(a, z), std::sqrt(std::max(0.0, e.eigenvalues(0))), 1e-8);
}

TEST(Pseudospectrum, DiagZeroOne)
{
    CMatrix a = CMatrix::Zero(2, 2);
    a(1, 1) = 1.0;
    const double eps = 0.1;
    const GridSpec grid = default_grid(a, eps, 201);
    const std::vector<Complex> ref = {0.0, 1.0};
    const PseudospectrumReport r = pseudospectrum(a, eps, grid, ref, 1);
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex z = grid.point(static_cast<int>(i / 201), static_cast<int>(i % 201));
        count += (std::abs(z) < eps || std::abs(z - 1.0) < eps) ? 1 : 0;
    }
    EXPECT_EQ(r.members.size(), count);
    EXPECT_LT(r.d_eps, eps);
    EXPECT_EQ(pseudospectrum(a, eps, grid, {}, 1).d_eps, std::numeric_limits<double>::infinity());
}

TEST(Pseudospectrum, DEpsMonotoneInEps)
{
    const CMatrix a = testsupport::random_contraction(4, 8);
    GridSpec grid = default_grid(a, 0.3, 41);
    Eigen::ComplexEigenSolver<CMatrix> es(a);
    const std::vector<Complex> ref = testsupport::to_vector(es.eigenvalues());
    double previous = 0.0;
    for (double eps : {0.02, 0.05, 0.1, 0.2, 0.3}) {
        const PseudospectrumReport r = pseudospectrum(a, eps, grid, ref, 1);
        EXPECT_GE(r.d_eps, previous);
        previous = r.d_eps;
    }
}

TEST(Pseudospectrum, ThreadCountDoesNotChangeResult)
{
    const CMatrix a = testsupport::random_contraction(4, 9);
    const GridSpec grid = default_grid(a, 0.1, 51);
    const PseudospectrumReport x = pseudospectrum(a, 0.1, grid, {}, 1);
    const PseudospectrumReport y = pseudospectrum(a, 0.1, grid, {}, 4);
    EXPECT_EQ(x.members, y.members);
    EXPECT_EQ(x.member_sigma_min, y.member_sigma_min);
}

TEST(Pseudospectrum, GridMustCoverDisc)
{
    const CMatrix a = CMatrix::Identity(2, 2);
    GridSpec small;
    small.half_width = 0.5;
    small.resolution = 11;
    EXPECT_THROW(pseudospectrum(a, 0.1, small, {}, 1), std::invalid_argument);
    EXPECT_THROW(pseudospectrum(a, 0.0, default_grid(a, 0.1, 11), {}, 1), std::invalid_argument);
}

TEST(Scatter, NormalEnsembleGivesZeros)
{
    const std::vector<EnsembleSpec> e = {PerturbedNormalSpec{5, 0.0, 1}, PerturbedNormalSpec{3, 0.0, 2}};
    for (const ScatterRow& r : f_scatter(e, {}, 1)) {
        EXPECT_LT(r.defect, 1e-12);
        EXPECT_LT(r.dist_frob_exact, 1e-6);
        EXPECT_LT(r.dist_op_witness, 1e-6);
    }
}

TEST(Scatter, ShiftFrobeniusRatioIsOneHalf)
{
    std::vector<EnsembleSpec> e;
    for (int m = 2; m <= 32; m += 2)
        e.push_back(ShiftExampleSpec{m});
    for (const ScatterRow& r : f_scatter(e, {}, 2)) {
        EXPECT_NEAR(r.frob_ratio, 0.5, 1e-9) << r.label;
        EXPECT_GE(r.dist_op_witness, r.lower_bound_op - 1e-9);
    }
}

TEST(Scatter, DefectMonotoneInDeltaAndThreadInvariant)
{
    std::vector<EnsembleSpec> e;
    for (double delta : {0.01, 0.05, 0.1, 0.2, 0.3})
        e.push_back(PerturbedNormalSpec{6, delta, 11});
    const auto rows = f_scatter(e, {}, 1);
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_GT(rows[i].defect, rows[i - 1].defect);
    std::ostringstream a;
    std::ostringstream b;
    write_scatter_csv(a, rows);
    write_scatter_csv(b, f_scatter(e, {}, 3));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Csv, SeventeenSignificantDigits)
{
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(2.0), "2");
}
