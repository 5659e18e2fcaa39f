#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nearnormal/gallery.hpp"
#include "nearnormal/linalg.hpp"
#include "nearnormal/nearest_normal.hpp"

namespace nearnormal {

// ---------------------------------------------------------------------------
// Truncations A_lambda = P_lambda A P_lambda, with P_lambda the spectral
// projection of G for eigenvalues below lambda.
// ---------------------------------------------------------------------------

struct TruncationModel {
    std::vector<double> g;  ///< eigenvalues of G, ascending
    CMatrix a;              ///< A written in G's eigenbasis (same order as g)
    double norm_a = 0;
    double norm_commutator_ga = 0;  ///< ||[G, A]||
    /// Largest admissible lambda (the edge guard of a finite window).
    double lambda_limit = std::numeric_limits<double>::infinity();
};

/// Computes the ambient norms. Throws std::invalid_argument if g is unsorted
/// or sizes disagree.
TruncationModel make_truncation_model(std::vector<double> g, CMatrix a,
                                      double lambda_limit = std::numeric_limits<double>::infinity());

/// Reorders the window basis by |k| (ties by k) and guards lambda <= K/2.
TruncationModel laurent_truncation_model(const LaurentWindow& w);

/// N(lambda) = #{j : g_j < lambda}.
long count_below(std::span<const double> g, double lambda);
/// N_1(lambda) = sup_{mu <= lambda} (N(mu) - N(mu - 1)), exact over breakpoints.
long max_unit_window(std::span<const double> g, double lambda);

struct CountingReport {
    std::vector<double> lambda_grid;
    std::vector<long> n;
    std::vector<long> n1;
};

CountingReport counting_functions(std::span<const double> g, std::span<const double> lambda_grid);

/// A restricted to the first N(lambda) basis vectors. Throws EmptyTruncation.
CMatrix truncate(const TruncationModel& model, double lambda);

struct TruncationCheck {
    double lambda = 0;
    long n = 0;
    long n1 = 0;
    double lhs2_a = 0;      ///< ||(I - P) A P||_2^2
    double lhs2_a_adj = 0;  ///< ||(I - P) A* P||_2^2
    double rhs2 = 0;        ///< (||A||^2 + pi^2/6 ||[G,A]||^2) N_1
    double lhs3 = 0;        ///< ||[A_lambda*, A_lambda]||_1
    double rhs3 = 0;        ///< (2 ||A||^2 + pi^2/3 ||[G,A]||^2) N_1
    bool pass = false;
};

/// Throws std::invalid_argument beyond the model's lambda_limit and
/// EmptyTruncation when N(lambda) = 0.
TruncationCheck verify_truncation_bounds(const TruncationModel& model, double lambda);

struct ScalingRow {
    TruncationCheck check;
    double dist1_witness = 0;  ///< S_1 distance of the nearest-normal witness (an upper bound)
    double dist1_over_n = 0;
};

std::vector<ScalingRow> truncation_scaling(const TruncationModel& model,
                                           std::span<const double> lambda_grid,
                                           const DiagonalOptions& opts);

// ---------------------------------------------------------------------------
// Pseudospectra
// ---------------------------------------------------------------------------

/// Square lattice of resolution x resolution points on
/// [center - h, center + h] x [center - h i, center + h i].
struct GridSpec {
    Complex center{0.0, 0.0};
    double half_width = 1.0;
    int resolution = 201;

    double step() const;
    Complex point(int row, int col) const;  ///< row indexes the imaginary axis
    std::size_t size() const { return static_cast<std::size_t>(resolution) * resolution; }
};

/// Grid centred at 0 whose square contains the disc of radius ||A|| + eps.
GridSpec default_grid(const CMatrix& a, double eps, int resolution = 201);

/// sigma_min(A - z I).
double shifted_sigma_min(const CMatrix& a, Complex z);

struct PseudospectrumReport {
    double epsilon = 0;
    GridSpec grid;
    std::vector<Complex> members;
    std::vector<double> member_sigma_min;
    /// Max distance from a member to the reference set; +inf when members
    /// exist but the reference set is empty, 0 when there are no members.
    double d_eps = 0;
};

/// Grid points with sigma_min(A - zI) < eps. The grid must contain the disc
/// of radius ||A|| + eps (std::invalid_argument otherwise).
PseudospectrumReport pseudospectrum(const CMatrix& a, double eps, const GridSpec& grid,
                                    std::span<const Complex> reference, int threads = 1);

// ---------------------------------------------------------------------------
// Commutator / distance scatter
// ---------------------------------------------------------------------------

struct ScatterRow {
    std::string label;
    long dim = 0;
    double defect = 0;          ///< ||[A*,A]||
    double defect_frob = 0;     ///< ||[A*,A]||_2
    double dist_op_witness = 0; ///< ||A - T|| for the nearest-normal witness
    double dist_frob_exact = 0;
    double lower_bound_op = 0;  ///< defect / 4
    double frob_ratio = 0;      ///< dist_frob_exact / defect_frob
};

/// One row per ensemble member, each rescaled to ||A|| <= 1. Throws
/// std::logic_error if a row violates dist_op_witness >= defect/4 - 1e-9.
std::vector<ScatterRow> f_scatter(const std::vector<EnsembleSpec>& ensemble,
                                  const DiagonalOptions& opts, int threads = 1);

// ---------------------------------------------------------------------------
// CSV output: fixed header row, 17 significant digits, preceded by the
// caller's comment lines (each written as "# line").
// ---------------------------------------------------------------------------

std::string format_double(double v);

void write_truncation_csv(std::ostream& os, std::span<const ScalingRow> rows,
                          std::span<const std::string> comments = {});
void write_pseudospectrum_csv(std::ostream& os, const PseudospectrumReport& report,
                              std::span<const std::string> comments = {});
void write_scatter_csv(std::ostream& os, std::span<const ScatterRow> rows,
                       std::span<const std::string> comments = {});

} // namespace nearnormal
