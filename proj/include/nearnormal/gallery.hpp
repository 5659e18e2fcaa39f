#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nearnormal/linalg.hpp"

namespace nearnormal {

/// m x m matrix with A e_{2i} = e_{2i-1}, A e_{2i-1} = 0 (1-based), m even.
CMatrix shift_example(int m);

struct AlmostCommutingPair {
    CMatrix a;  ///< diag(1 - 2j/m), j = 0..m
    CMatrix b;  ///< weighted shift, B e_j = 2/(m+1) sqrt((j+1)(m-j)) e_{j+1}
    double norm_a = 0;
    double norm_b = 0;
    double norm_ab = 0;  ///< ||[A, B]||
    double norm_bb = 0;  ///< ||[B*, B]||
};

/// (m+1) x (m+1) pair; the four norm bounds are checked on construction and a
/// violation throws std::logic_error.
AlmostCommutingPair almost_commuting_pair(int m);

/// Verifies ||A|| = 1, ||B|| <= 1, ||[A,B]|| <= 2/m, ||[B*,B]|| <= 4/m
/// (with 1e-12 rounding slack on the inequalities) for matrices of the pair's
/// shape. Returns the measured norms.
AlmostCommutingPair certify_almost_commuting_pair(CMatrix a, CMatrix b, int m);

/// Operator norm of a matrix with at most one nonzero per row and column
/// (a generalized permutation): the largest entry modulus. Throws
/// std::invalid_argument for other sparsity patterns.
double generalized_permutation_norm(const CMatrix& a);

struct RandomNormal {
    CMatrix matrix;
    CVector eigenvalues;  ///< uniform in the open unit disc
    CMatrix basis;        ///< Haar unitary
};

RandomNormal random_normal(int dim, std::uint64_t seed);

/// N + delta E/||E|| with N random normal and E complex Gaussian, divided by
/// max(1, norm) so the result has operator norm at most one.
CMatrix perturbed_normal(int dim, double delta, std::uint64_t seed);

/// Laurent symbol coefficients c_offset, offsets in [-d, d].
using LaurentSymbol = std::map<int, Complex>;

struct LaurentWindow {
    CMatrix g;  ///< diag(|k|), k = -K..K in natural order
    CMatrix a;  ///< A_{jk} = c_{j-k}
    int window = 0;  ///< K
    double commutator_norm = 0;  ///< ||[G, A]||
    double commutator_bound = 0; ///< sum_offsets |offset| |c_offset|
};

/// Multiplication by the trigonometric polynomial sum c_n e^{i n theta} in the
/// Fourier basis e^{i k theta}, k = -K..K. Throws std::invalid_argument if
/// some offset exceeds K.
LaurentWindow laurent_multiplication(const LaurentSymbol& coeffs, int window);

/// The symbol with c_1 = 1 (the bilateral shift).
LaurentSymbol shift_symbol();

/// Complex Gaussian coefficients on offsets -degree..degree, normalized so
/// that sum |c_n| = 1 (hence ||A|| <= 1).
LaurentSymbol random_laurent_symbol(int degree, std::uint64_t seed);

struct ShiftExampleSpec {
    int m;
};
struct AlmostCommutingSpec {
    int m;
};
struct PerturbedNormalSpec {
    int dim;
    double delta;
    std::uint64_t seed;
};
struct LaurentSpec {
    LaurentSymbol coeffs;
    int window;
};

using EnsembleSpec =
    std::variant<ShiftExampleSpec, AlmostCommutingSpec, PerturbedNormalSpec, LaurentSpec>;

/// The ensemble member's matrix (B for an almost-commuting pair, A for a
/// Laurent window).
CMatrix materialize(const EnsembleSpec& spec);
std::string describe(const EnsembleSpec& spec);

} // namespace nearnormal
