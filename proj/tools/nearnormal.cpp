#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nearnormal/errors.hpp"
#include "nearnormal/experiments.hpp"
#include "nearnormal/gallery.hpp"
#include "nearnormal/io.hpp"
#include "nearnormal/nearest_normal.hpp"
#include "nearnormal/partition.hpp"
#include "nearnormal/surgery.hpp"

namespace {

using namespace nearnormal;

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

int default_threads()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Options shared by every subcommand. Threads only affect scheduling and
// output paths only affect placement, so neither is echoed into outputs.
struct Common {
    std::uint64_t seed = 0;
    int threads = default_threads();
    std::string output = "-";
};

void add_common(CLI::App* sub, Common& c, bool with_seed = true)
{
    if (with_seed)
        sub->add_option("--seed", c.seed, "Seed for every random draw");
    sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("-o,--output", c.output, "Output file ('-' for stdout)");
    sub->add_option("--config", "JSON file of option values (command line wins)");
}

std::string p_name(double p) { return std::isinf(p) ? "inf" : format_double(p); }

std::vector<double> parse_ps(const std::vector<std::string>& raw)
{
    std::vector<double> ps;
    for (const std::string& s : raw) {
        const double p = parse_real(s);
        if (!(p >= 1.0))
            throw std::invalid_argument("Schatten index must be >= 1, got " + s);
        ps.push_back(p);
    }
    return ps;
}

std::vector<double> parse_reals(const std::vector<std::string>& raw)
{
    std::vector<double> out;
    for (const std::string& s : raw)
        out.push_back(parse_real(s));
    return out;
}

Json norm_map(const std::map<double, double>& m)
{
    Json j = Json::object();
    for (const auto& [p, v] : m)
        j[p_name(p)] = v;
    return j;
}

Json complex_list(const CVector& v)
{
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        j.push_back(complex_to_json(v(i)));
    return j;
}

Json complex_list(const std::vector<Complex>& v)
{
    Json j = Json::array();
    for (Complex z : v)
        j.push_back(complex_to_json(z));
    return j;
}

// JSON cannot hold infinities; they are written as strings.
Json real_or_string(double v)
{
    if (std::isfinite(v))
        return v;
    return v > 0 ? "inf" : "-inf";
}

void write_report(const std::string& path, const std::string& command, Json config, Json result)
{
    const Json doc = {{"artifact", artifact_header()},
                      {"command", command},
                      {"config", std::move(config)},
                      {"result", std::move(result)}};
    write_text(path, doc.dump(2) + "\n");
}

std::vector<std::string> csv_header(const std::string& command, const Json& config)
{
    return {std::string(kArtifactName) + " " + artifact_version() + " " + command,
            "config: " + config.dump()};
}

Tolerances tolerances(double normal_tol)
{
    Tolerances t;
    t.normal = normal_tol;
    return t;
}

// ---------------------------------------------------------------------------
// gallery
// ---------------------------------------------------------------------------

struct GalleryParams {
    Common common;
    int m = 0;
    int dim = 0;
    double delta = 0.0;
    std::string out_dir = ".";
    int window = 0;
    std::string symbol = "shift";
    std::vector<std::string> coeffs;
    int degree = 2;
    std::string out_g;
};

LaurentSymbol parse_coefficients(const std::vector<std::string>& raw)
{
    LaurentSymbol c;
    for (const std::string& s : raw) {
        const auto colon = s.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("coefficient '" + s + "' is not of the form k:re,im");
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(s.substr(0, colon), &used);
            if (used != colon)
                throw std::invalid_argument("bad offset");
        } catch (const std::exception&) {
            throw std::invalid_argument("coefficient '" + s + "' has a bad offset");
        }
        c[k] += parse_complex(s.substr(colon + 1));
    }
    return c;
}

LaurentSymbol resolve_symbol(const std::string& kind, const std::vector<std::string>& coeffs,
                             int degree, std::uint64_t seed)
{
    if (kind == "shift")
        return shift_symbol();
    if (kind == "random")
        return random_laurent_symbol(degree, seed);
    if (kind == "custom") {
        if (coeffs.empty())
            throw std::invalid_argument("custom symbol needs at least one --coeff");
        return parse_coefficients(coeffs);
    }
    throw std::invalid_argument("unknown symbol '" + kind + "'");
}

Json symbol_json(const LaurentSymbol& c)
{
    Json j = Json::object();
    for (const auto& [k, v] : c)
        j[std::to_string(k)] = complex_to_json(v);
    return j;
}

void write_generated(const std::string& path, CMatrix a, const std::string& generator,
                     Json config, std::optional<std::uint64_t> seed, Json properties = Json::object())
{
    MatrixFile f;
    f.matrix = std::move(a);
    f.metadata.name = generator;
    f.metadata.generator = generator;
    f.metadata.seed = seed;
    f.metadata.config = std::move(config);
    f.metadata.properties = std::move(properties);
    save_matrix(path, f);
}

void setup_gallery(CLI::App& app, GalleryParams& p, std::function<void()>& action)
{
    CLI::App* gallery = app.add_subcommand("gallery", "Write a generator output as a matrix file");
    gallery->require_subcommand(1);

    CLI::App* shift = gallery->add_subcommand("shift", "Shift example: m x m, m even");
    shift->add_option("--m", p.m, "Dimension")->required();
    add_common(shift, p.common, false);
    shift->callback([&] {
        action = [&] {
            const Json cfg = {{"m", p.m}};
            write_generated(p.common.output, shift_example(p.m), "shift_example", cfg, std::nullopt);
        };
    });

    CLI::App* pair = gallery->add_subcommand("pair", "Almost commuting pair, written as A.json and B.json");
    pair->add_option("--m", p.m, "Parameter m (matrices are (m+1) x (m+1))")->required();
    pair->add_option("--out-dir", p.out_dir, "Directory for A.json and B.json");
    add_common(pair, p.common, false);
    pair->callback([&] {
        action = [&] {
            const AlmostCommutingPair ac = almost_commuting_pair(p.m);
            const Json cfg = {{"m", p.m}};
            const Json bounds = {{"norm_a", ac.norm_a},
                                 {"norm_b", ac.norm_b},
                                 {"norm_ab", ac.norm_ab},
                                 {"norm_bb", ac.norm_bb},
                                 {"bound_ab", 2.0 / p.m},
                                 {"bound_bb", 4.0 / p.m}};
            const std::string dir = p.out_dir.empty() ? "." : p.out_dir;
            write_generated(dir + "/A.json", ac.a, "almost_commuting_pair:A", cfg, std::nullopt, bounds);
            write_generated(dir + "/B.json", ac.b, "almost_commuting_pair:B", cfg, std::nullopt, bounds);
            write_report(p.common.output, "gallery pair", cfg, bounds);
        };
    });

    CLI::App* perturbed = gallery->add_subcommand("perturbed", "Random normal plus a Gaussian perturbation");
    perturbed->add_option("--dim", p.dim, "Dimension")->required();
    perturbed->add_option("--delta", p.delta, "Perturbation size")->required();
    add_common(perturbed, p.common);
    perturbed->callback([&] {
        action = [&] {
            const Json cfg = {{"dim", p.dim}, {"delta", p.delta}, {"seed", p.common.seed}};
            write_generated(p.common.output, perturbed_normal(p.dim, p.delta, p.common.seed),
                            "perturbed_normal", cfg, p.common.seed);
        };
    });

    CLI::App* normal = gallery->add_subcommand("normal", "Random normal matrix with spectrum in the unit disc");
    normal->add_option("--dim", p.dim, "Dimension")->required();
    add_common(normal, p.common);
    normal->callback([&] {
        action = [&] {
            const Json cfg = {{"dim", p.dim}, {"seed", p.common.seed}};
            const RandomNormal r = random_normal(p.dim, p.common.seed);
            write_generated(p.common.output, r.matrix, "random_normal", cfg, p.common.seed,
                            {{"eigenvalues", complex_list(r.eigenvalues)}});
        };
    });

    CLI::App* laurent = gallery->add_subcommand("laurent", "Laurent multiplication on the window |k| <= K");
    laurent->add_option("--K", p.window, "Window half-size")->required();
    laurent->add_option("--symbol", p.symbol, "shift, random or custom")
        ->check(CLI::IsMember({"shift", "random", "custom"}));
    laurent->add_option("--coeff", p.coeffs, "Coefficient k:re,im (custom symbol)");
    laurent->add_option("--degree", p.degree, "Degree of the random symbol");
    laurent->add_option("--out-g", p.out_g, "Also write G = diag(|k|) here");
    add_common(laurent, p.common);
    laurent->callback([&] {
        action = [&] {
            const LaurentSymbol c = resolve_symbol(p.symbol, p.coeffs, p.degree, p.common.seed);
            const LaurentWindow w = laurent_multiplication(c, p.window);
            Json cfg = {{"K", p.window}, {"symbol", p.symbol}, {"coefficients", symbol_json(c)}};
            if (p.symbol == "random")
                cfg["seed"] = p.common.seed, cfg["degree"] = p.degree;
            const Json props = {{"commutator_norm", w.commutator_norm},
                                {"commutator_bound", w.commutator_bound}};
            write_generated(p.common.output, w.a, "laurent_multiplication", cfg, std::nullopt, props);
            if (!p.out_g.empty())
                write_generated(p.out_g, w.g, "laurent_multiplication:G", cfg, std::nullopt);
        };
    });
}

// ---------------------------------------------------------------------------
// nearest
// ---------------------------------------------------------------------------

struct NearestParams {
    Common common;
    std::string input;
    std::vector<std::string> ps = {"1", "2", "inf"};
    int restarts = 4;
    int max_sweeps = 200;
    double obj_tol = 1e-12;
    std::string witness;
};

void setup_nearest(CLI::App& app, NearestParams& p, std::function<void()>& action)
{
    CLI::App* sub = app.add_subcommand("nearest", "Nearest-normal witness and distance report");
    sub->add_option("input,--input", p.input, "Matrix file (JSON or CSV)")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeFirst);
    sub->add_option("--p", p.ps, "Schatten indices (use inf for the operator norm)");
    sub->add_option("--restarts", p.restarts, "Random starts besides the identity")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-sweeps", p.max_sweeps, "Sweep limit per start")->check(CLI::PositiveNumber);
    sub->add_option("--obj-tol", p.obj_tol, "Relative convergence tolerance");
    sub->add_option("--witness", p.witness, "Write the normal witness here");
    add_common(sub, p.common);
    sub->callback([&] {
        action = [&] {
            const std::vector<double> ps = parse_ps(p.ps);
            const CMatrix a = load_matrix(p.input).matrix;
            DiagonalOptions opts;
            opts.restarts = p.restarts;
            opts.max_sweeps = p.max_sweeps;
            opts.obj_tol = p.obj_tol;
            opts.seed = p.common.seed;
            const DistanceReport r = nearest_normal(a, ps, opts);

            Json pj = Json::array();
            for (double q : ps)
                pj.push_back(p_name(q));
            const Json cfg = {{"input", p.input},        {"p", pj},
                              {"restarts", p.restarts},  {"max_sweeps", p.max_sweeps},
                              {"obj_tol", p.obj_tol},    {"seed", p.common.seed}};
            const Json result = {{"dim", a.rows()},
                                 {"operator_norm", operator_norm(a)},
                                 {"normality_defect", normality_defect(a)},
                                 {"distances", norm_map(r.distances)},
                                 {"lower_bounds", norm_map(r.lower_bounds)},
                                 {"frobenius_exact", r.frobenius_exact},
                                 {"sweeps", r.sweeps},
                                 {"converged", r.converged},
                                 {"objective_history", r.objective_history},
                                 {"witness_defect", r.witness_defect}};
            if (!p.witness.empty())
                write_generated(p.witness, r.witness, "nearest_normal_witness", cfg, std::nullopt);
            write_report(p.common.output, "nearest", cfg, result);
        };
    });
}

// ---------------------------------------------------------------------------
// partition
// ---------------------------------------------------------------------------

struct PartitionParams {
    Common common;
    std::string input;
    double side = 0.0;
    std::string cover;
    std::string approximant;
    std::string projections;
    double normal_tol = Tolerances{}.normal;
};

Json region_json(const Region& r)
{
    if (r.kind() == Region::Kind::disc)
        return {{"kind", "disc"}, {"center", complex_to_json(r.center())}, {"radius", r.size()}};
    return {{"kind", "square"}, {"center", complex_to_json(r.center())}, {"side", r.size()}};
}

void setup_partition(CLI::App& app, PartitionParams& p, std::function<void()>& action)
{
    CLI::App* sub = app.add_subcommand("partition", "Finite-spectrum approximation from a cover");
    sub->add_option("input,--input", p.input, "Normal matrix file")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeFirst);
    CLI::Option* side = sub->add_option("--side", p.side, "Side of the square lattice cover");
    CLI::Option* cover = sub->add_option("--cover", p.cover, "JSON cover file");
    side->excludes(cover);
    cover->excludes(side);
    sub->add_option("--approximant", p.approximant, "Write T = sum z_j P_j here");
    sub->add_option("--projections", p.projections, "Write the projections and labels here (JSON)");
    sub->add_option("--normal-tol", p.normal_tol, "Admissible ||[A*,A]|| / ||A||^2");
    add_common(sub, p.common, false);
    sub->callback([&, side, cover] {
        if (side->count() == 0 && cover->count() == 0)
            throw CLI::RequiredError("--side or --cover");
        action = [&, side] {
            Json cfg = {{"input", p.input}, {"normal_tol", p.normal_tol}};
            const bool use_side = side->count() > 0;
            if (use_side) {
                if (!(p.side > 0.0) || !std::isfinite(p.side))
                    throw std::invalid_argument("--side must be positive");
                cfg["side"] = p.side;
            } else {
                cfg["cover"] = p.cover;
            }
            const CMatrix a = load_matrix(p.input).matrix;
            const SpectralDecomp d = normal_spectral_decomp(a, tolerances(p.normal_tol));
            const std::vector<Complex> points(d.eigenvalues.data(),
                                              d.eigenvalues.data() + d.eigenvalues.size());
            const Cover c = use_side ? square_cover(points, p.side) : load_cover(p.cover);
            const FiniteSpectrumApprox f = finite_spectrum_approx(d, c);
            const ProjectionDefects pd = projection_defects(f.resolution);

            Json regions = Json::array();
            for (const Region& r : c.regions)
                regions.push_back(region_json(r));
            const Json result = {
                {"dim", a.rows()},
                {"error_bound", f.error_bound},
                {"error_actual", f.error_actual},
                {"max_displacement", f.max_displacement},
                {"multiplicity", f.multiplicity},
                {"max_diameter", c.max_diameter()},
                {"pass", f.error_actual <= f.error_bound},
                {"regions", regions},
                {"labels", complex_list(f.resolution.labels)},
                {"assignment", f.resolution.assignment},
                {"eigenvalues", complex_list(d.eigenvalues)},
                {"projection_defects",
                 {{"sum_to_identity", pd.sum_to_identity},
                  {"idempotent", pd.idempotent},
                  {"self_adjoint", pd.self_adjoint},
                  {"orthogonal", pd.orthogonal}}}};
            if (!p.approximant.empty())
                write_generated(p.approximant, f.approximant, "finite_spectrum_approx", cfg, std::nullopt);
            if (!p.projections.empty()) {
                Json proj = Json::array();
                for (const CMatrix& m : f.resolution.projections)
                    proj.push_back(matrix_to_json(m));
                const Json doc = {{"artifact", artifact_header()},
                                  {"config", cfg},
                                  {"labels", complex_list(f.resolution.labels)},
                                  {"projections", proj}};
                write_text(p.projections, doc.dump() + "\n");
            }
            write_report(p.common.output, "partition", cfg, result);
        };
    });
}

// ---------------------------------------------------------------------------
// surgery
// ---------------------------------------------------------------------------

struct SurgeryParams {
    Common common;
    std::string input;
    std::string op;
    std::string center = "0";
    double radius = 0.0;
    std::string anchor;
    std::string minus;
    std::string plus;
    double chord_tol = 1e-9;
    std::string map = "radial";
    std::string a = "1";
    std::string b = "0";
    double eps = 0.0;
    std::string matrix_out;
    double normal_tol = Tolerances{}.normal;
};

Json surgery_json(const SurgeryResult& r)
{
    Json moved = Json::array();
    for (Eigen::Index i : r.moved)
        moved.push_back(i);
    return {{"moved", moved},
            {"moved_count", r.moved_count},
            {"perturbation_norm", r.perturbation_norm},
            {"bound", r.bound},
            {"pass", r.perturbation_norm <= r.bound},
            {"output_eigenvalues", complex_list(r.spectrum.eigenvalues)},
            {"output_defect", normality_defect(r.output)}};
}

void setup_surgery(CLI::App& app, SurgeryParams& p, std::function<void()>& action)
{
    CLI::App* sub = app.add_subcommand("surgery", "Move the spectrum of a normal matrix");
    sub->add_option("input,--input", p.input, "Normal matrix file")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeFirst);
    sub->add_option("--op", p.op, "remove-disc, remove-arc, transport or graph")
        ->required()
        ->check(CLI::IsMember({"remove-disc", "remove-arc", "transport", "graph"}));
    sub->add_option("--center", p.center, "Disc centre re,im");
    sub->add_option("--radius", p.radius, "Disc radius");
    sub->add_option("--anchor", p.anchor, "Anchor re,im for remove-disc (default: centre)");
    sub->add_option("--minus", p.minus, "Chord endpoint e- (remove-arc)");
    sub->add_option("--plus", p.plus, "Chord endpoint e+ (remove-arc)");
    sub->add_option("--chord-tol", p.chord_tol, "Relative distance to the chord accepted as on it");
    sub->add_option("--map", p.map, "radial or affine (transport)")
        ->check(CLI::IsMember({"radial", "affine"}));
    sub->add_option("--a", p.a, "Affine slope re,im");
    sub->add_option("--b", p.b, "Affine offset re,im");
    sub->add_option("--eps", p.eps, "Oscillation scale (graph)");
    sub->add_option("--matrix-out", p.matrix_out, "Write the output matrix here");
    sub->add_option("--normal-tol", p.normal_tol, "Admissible ||[A*,A]|| / ||A||^2");
    add_common(sub, p.common, false);
    sub->callback([&] {
        action = [&] {
            Json cfg = {{"input", p.input}, {"op", p.op}, {"normal_tol", p.normal_tol}};
            const CMatrix a = load_matrix(p.input).matrix;
            const SpectralDecomp d = normal_spectral_decomp(a, tolerances(p.normal_tol));
            auto disc = [&] {
                cfg["center"] = complex_to_json(parse_complex(p.center));
                cfg["radius"] = p.radius;
                return Region::disc(parse_complex(p.center), p.radius);
            };

            Json result = {{"dim", a.rows()}, {"input_eigenvalues", complex_list(d.eigenvalues)}};
            CMatrix output;
            if (p.op == "remove-disc") {
                const Region r = disc();
                const Complex anchor = p.anchor.empty() ? r.center() : parse_complex(p.anchor);
                cfg["anchor"] = complex_to_json(anchor);
                const SurgeryResult s = remove_region(d, r, anchor);
                result.update(surgery_json(s));
                output = s.output;
            } else if (p.op == "remove-arc") {
                const Region r = disc();
                if (p.minus.empty() || p.plus.empty())
                    throw std::invalid_argument("remove-arc needs --minus and --plus");
                const Complex em = parse_complex(p.minus);
                const Complex ep = parse_complex(p.plus);
                cfg["minus"] = complex_to_json(em);
                cfg["plus"] = complex_to_json(ep);
                cfg["chord_tol"] = p.chord_tol;
                const SurgeryResult s = remove_arc(d, r, em, ep, p.chord_tol);
                result.update(surgery_json(s));
                output = s.output;
            } else if (p.op == "transport") {
                cfg["map"] = p.map;
                PlaneMap m = affine(1.0, 0.0);
                if (p.map == "radial") {
                    m = radial_collapse(disc());
                } else {
                    const Complex sa = parse_complex(p.a);
                    const Complex sb = parse_complex(p.b);
                    cfg["a"] = complex_to_json(sa);
                    cfg["b"] = complex_to_json(sb);
                    m = affine(sa, sb);
                }
                const SpectralDecomp t = transport_spectrum(d, m);
                output = t.reconstruct();
                result["output_eigenvalues"] = complex_list(t.eigenvalues);
                result["perturbation_norm"] = operator_norm(a - output);
                result["output_defect"] = normality_defect(output);
            } else {
                cfg["eps"] = p.eps;
                const GraphApprox g = graph_normal_approx(d, p.eps);
                output = g.output;
                const double r = g.radius;
                const double net = r > 0.0 ? check_oscillator(Oscillator(p.eps, r), p.eps, r) : kNoNet;
                result.update({{"radius", g.radius},
                               {"scale", g.scale},
                               {"max_shift", g.max_shift},
                               {"perturbation_norm", g.perturbation_norm},
                               {"bound", g.bound},
                               {"pass", g.perturbation_norm <= g.bound},
                               {"output_norm", operator_norm(g.output)},
                               {"output_defect", g.normality_defect},
                               {"condition_net", real_or_string(net)},
                               {"output_eigenvalues", complex_list(g.spectrum.eigenvalues)}});
            }
            if (!p.matrix_out.empty())
                write_generated(p.matrix_out, output, "surgery:" + p.op, cfg, std::nullopt);
            write_report(p.common.output, "surgery", cfg, result);
        };
    });
}

// ---------------------------------------------------------------------------
// truncate
// ---------------------------------------------------------------------------

struct TruncateParams {
    Common common;
    std::string symbol = "shift";
    int window = 32;
    std::vector<std::string> coeffs;
    int degree = 2;
    std::vector<std::string> lambdas;
    int restarts = 2;
    int max_sweeps = 200;
};

void setup_truncate(CLI::App& app, TruncateParams& p, std::function<void()>& action)
{
    CLI::App* sub = app.add_subcommand("truncate", "Truncation inequalities for a Laurent model");
    sub->add_option("--symbol", p.symbol, "shift, random or custom")
        ->check(CLI::IsMember({"shift", "random", "custom"}));
    sub->add_option("--K", p.window, "Window half-size")->check(CLI::PositiveNumber);
    sub->add_option("--coeff", p.coeffs, "Coefficient k:re,im (custom symbol)");
    sub->add_option("--degree", p.degree, "Degree of the random symbol");
    sub->add_option("--lambda", p.lambdas, "Grid of lambda values (default 1..K/2)");
    sub->add_option("--restarts", p.restarts, "Random starts for the S1 witness")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-sweeps", p.max_sweeps, "Sweep limit per start")->check(CLI::PositiveNumber);
    add_common(sub, p.common);
    sub->callback([&] {
        action = [&] {
            const LaurentSymbol c = resolve_symbol(p.symbol, p.coeffs, p.degree, p.common.seed);
            const LaurentWindow w = laurent_multiplication(c, p.window);
            const TruncationModel model = laurent_truncation_model(w);
            std::vector<double> grid = parse_reals(p.lambdas);
            if (p.lambdas.empty())
                for (int l = 1; l <= p.window / 2; ++l)
                    grid.push_back(l);

            DiagonalOptions opts;
            opts.restarts = p.restarts;
            opts.max_sweeps = p.max_sweeps;
            opts.seed = p.common.seed;
            const std::vector<ScalingRow> rows = truncation_scaling(model, grid, opts);

            Json cfg = {{"symbol", p.symbol},        {"K", p.window},
                        {"coefficients", symbol_json(c)}, {"lambda", grid},
                        {"restarts", p.restarts},    {"max_sweeps", p.max_sweeps},
                        {"seed", p.common.seed}};
            if (p.symbol == "random")
                cfg["degree"] = p.degree;
            std::vector<std::string> comments = csv_header("truncate", cfg);
            comments.push_back("lambda_limit: " + format_double(model.lambda_limit) +
                               " (constants computed on the window; lambda kept at most K/2)");
            comments.push_back("norm_A: " + format_double(model.norm_a));
            comments.push_back("norm_commutator_GA: " + format_double(model.norm_commutator_ga));
            comments.push_back("dist1_witness is the S1 distance of a normal witness, an upper bound");
            std::ostringstream os;
            write_truncation_csv(os, rows, comments);
            write_text(p.common.output, os.str());
        };
    });
}

// ---------------------------------------------------------------------------
// pseudospec
// ---------------------------------------------------------------------------

struct PseudospecParams {
    Common common;
    std::string input;
    double eps = 0.0;
    int resolution = 201;
    std::string center = "0";
    double half_width = 0.0;
    std::vector<std::string> reference;
    bool reference_spectrum = false;
};

void setup_pseudospec(CLI::App& app, PseudospecParams& p, std::function<void()>& action)
{
    CLI::App* sub = app.add_subcommand("pseudospec", "Grid eps-pseudospectrum");
    sub->add_option("input,--input", p.input, "Matrix file")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeFirst);
    sub->add_option("--eps", p.eps, "Pseudospectral level")->required();
    sub->add_option("--resolution", p.resolution, "Points per grid side")->check(CLI::Range(2, 100000));
    sub->add_option("--center", p.center, "Grid centre re,im");
    sub->add_option("--half-width", p.half_width, "Grid half-width (default ||A|| + eps)");
    sub->add_option("--reference", p.reference, "Reference points re,im for d_eps");
    sub->add_flag("--reference-spectrum", p.reference_spectrum, "Use the eigenvalues of A as reference");
    add_common(sub, p.common, false);
    sub->callback([&] {
        action = [&] {
            const CMatrix a = load_matrix(p.input).matrix;
            GridSpec grid = default_grid(a, p.eps, p.resolution);
            grid.center = parse_complex(p.center);
            if (p.half_width > 0.0)
                grid.half_width = p.half_width;
            else if (grid.center != Complex(0.0, 0.0))
                grid.half_width += std::max(std::abs(grid.center.real()), std::abs(grid.center.imag()));

            std::vector<Complex> given;
            for (const std::string& s : p.reference)
                given.push_back(parse_complex(s));
            std::vector<Complex> ref = given;
            if (p.reference_spectrum) {
                Eigen::ComplexEigenSolver<CMatrix> es(a, false);
                if (es.info() != Eigen::Success)
                    throw std::runtime_error("eigenvalue computation failed");
                for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                    ref.push_back(es.eigenvalues()(i));
            }
            const PseudospectrumReport r = pseudospectrum(a, p.eps, grid, ref, p.common.threads);
            const Json cfg = {{"input", p.input},
                              {"eps", p.eps},
                              {"resolution", grid.resolution},
                              {"center", complex_to_json(grid.center)},
                              {"half_width", grid.half_width},
                              {"reference", complex_list(given)},
                              {"reference_spectrum", p.reference_spectrum}};
            std::ostringstream os;
            write_pseudospectrum_csv(os, r, csv_header("pseudospec", cfg));
            write_text(p.common.output, os.str());
        };
    });
}

// ---------------------------------------------------------------------------
// scatter
// ---------------------------------------------------------------------------

struct ScatterParams {
    Common common;
    std::vector<std::string> members;
    int restarts = 2;
    int max_sweeps = 200;
};

std::map<std::string, std::string> member_fields(const std::string& spec, std::string& kind)
{
    std::map<std::string, std::string> fields;
    std::stringstream ss(spec);
    std::string part;
    std::getline(ss, kind, ':');
    while (std::getline(ss, part, ':')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("ensemble member '" + spec + "': expected key=value, got '" + part + "'");
        fields[part.substr(0, eq)] = part.substr(eq + 1);
    }
    return fields;
}

int field_int(const std::map<std::string, std::string>& f, const std::string& key, const std::string& spec)
{
    const auto it = f.find(key);
    if (it == f.end())
        throw std::invalid_argument("ensemble member '" + spec + "' needs " + key);
    const double v = parse_real(it->second);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw std::invalid_argument("ensemble member '" + spec + "': " + key + " must be an integer");
    return static_cast<int>(v);
}

EnsembleSpec parse_member(const std::string& spec, std::uint64_t default_seed)
{
    std::string kind;
    const auto f = member_fields(spec, kind);
    auto allow = [&](std::initializer_list<std::string> keys, bool coefficients = false) {
        for (const auto& [k, v] : f) {
            const bool known = std::find(keys.begin(), keys.end(), k) != keys.end();
            if (!known && !(coefficients && k.size() > 1 && k[0] == 'c'))
                throw std::invalid_argument("ensemble member '" + spec + "': unknown key " + k);
        }
    };
    if (kind == "shift") {
        allow({"m"});
        return ShiftExampleSpec{field_int(f, "m", spec)};
    }
    if (kind == "pair") {
        allow({"m"});
        return AlmostCommutingSpec{field_int(f, "m", spec)};
    }
    if (kind == "perturbed") {
        allow({"dim", "delta", "seed"});
        const auto delta = f.find("delta");
        if (delta == f.end())
            throw std::invalid_argument("ensemble member '" + spec + "' needs delta");
        std::uint64_t seed = default_seed;
        if (const auto s = f.find("seed"); s != f.end())
            seed = std::stoull(s->second);
        return PerturbedNormalSpec{field_int(f, "dim", spec), parse_real(delta->second), seed};
    }
    if (kind == "laurent") {
        allow({"K"}, true);
        LaurentSpec l{{}, field_int(f, "K", spec)};
        for (const auto& [k, v] : f)
            if (k != "K")
                l.coeffs[std::stoi(k.substr(1))] += parse_complex(v);
        if (l.coeffs.empty())
            l.coeffs = shift_symbol();
        return l;
    }
    throw std::invalid_argument("unknown ensemble member kind '" + kind + "'");
}

void setup_scatter(CLI::App& app, ScatterParams& p, std::function<void()>& action)
{
    CLI::App* sub = app.add_subcommand("scatter", "Commutator norm versus distance to the normals");
    sub->add_option("--member", p.members,
                    "Ensemble member: shift:m=M, pair:m=M, perturbed:dim=D:delta=X[:seed=S], "
                    "laurent:K=K[:cN=re,im...]")
        ->required();
    sub->add_option("--restarts", p.restarts, "Random starts per member")->check(CLI::NonNegativeNumber);
    sub->add_option("--max-sweeps", p.max_sweeps, "Sweep limit per start")->check(CLI::PositiveNumber);
    add_common(sub, p.common);
    sub->callback([&] {
        action = [&] {
            std::vector<EnsembleSpec> ensemble;
            for (const std::string& m : p.members)
                ensemble.push_back(parse_member(m, p.common.seed));
            DiagonalOptions opts;
            opts.restarts = p.restarts;
            opts.max_sweeps = p.max_sweeps;
            opts.seed = p.common.seed;
            const std::vector<ScatterRow> rows = f_scatter(ensemble, opts, p.common.threads);
            Json labels = Json::array();
            for (const EnsembleSpec& e : ensemble)
                labels.push_back(describe(e));
            const Json cfg = {{"member", labels},
                              {"restarts", p.restarts},
                              {"max_sweeps", p.max_sweeps},
                              {"seed", p.common.seed}};
            std::vector<std::string> comments = csv_header("scatter", cfg);
            comments.push_back("members rescaled to ||A|| <= 1; dist_op_witness is an upper bound");
            std::ostringstream os;
            write_scatter_csv(os, rows, comments);
            write_text(p.common.output, os.str());
        };
    });
}

// ---------------------------------------------------------------------------
// --config expansion
// ---------------------------------------------------------------------------

CLI::App* find_target(CLI::App& app, const std::vector<std::string>& args)
{
    CLI::App* target = &app;
    for (const std::string& a : args) {
        if (a.empty() || a[0] == '-')
            continue;
        CLI::App* next = nullptr;
        for (CLI::App* s : target->get_subcommands({}))
            if (s->get_name() == a)
                next = s;
        if (!next)
            break;
        target = next;
    }
    return target;
}

bool given_on_command_line(const CLI::Option* opt, const std::vector<std::string>& args)
{
    for (const std::string& a : args)
        for (const std::string& name : opt->get_lnames())
            if (a == "--" + name || a.rfind("--" + name + "=", 0) == 0)
                return true;
    return false;
}

std::string scalar_token(const Json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number() || v.is_boolean())
        return v.dump();
    throw std::invalid_argument("config: unsupported value " + v.dump());
}

// Values from a JSON --config file are appended as ordinary arguments, so
// they go through the same validation as the command line.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty())
        return args;

    Json cfg;
    try {
        cfg = Json::parse(read_text(path));
    } catch (const Json::exception& e) {
        throw std::invalid_argument("config file: " + std::string(e.what()));
    }
    if (!cfg.is_object())
        throw std::invalid_argument("config file must hold a JSON object");

    CLI::App* target = find_target(app, args);
    if (target == &app)
        throw std::invalid_argument("--config needs a subcommand");
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config" || key == "help")
            throw std::invalid_argument("config: key '" + key + "' is not allowed");
        const CLI::Option* opt = nullptr;
        for (const CLI::Option* o : target->get_options())
            if (o->check_lname(key))
                opt = o;
        if (!opt)
            throw std::invalid_argument("config: unknown key '" + key + "' for " + target->get_name());
        if (given_on_command_line(opt, args))
            continue;
        const std::string flag = "--" + opt->get_lnames().front();
        if (value.is_boolean() && opt->get_type_size() == 0) {
            if (value.get<bool>())
                args.push_back(flag);
        } else if (value.is_array()) {
            args.push_back(flag);
            for (const Json& v : value)
                args.push_back(scalar_token(v));
        } else {
            args.push_back(flag + "=" + scalar_token(value));
        }
    }
    return args;
}

int run(int argc, char** argv)
{
    CLI::App app{"Distance to normal matrices: witnesses, approximants and experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", artifact_version());

    std::function<void()> action;
    GalleryParams gallery;
    NearestParams nearest;
    PartitionParams partition;
    SurgeryParams surgery;
    TruncateParams truncate_params;
    PseudospecParams pseudospec;
    ScatterParams scatter;
    setup_gallery(app, gallery, action);
    setup_nearest(app, nearest, action);
    setup_partition(app, partition, action);
    setup_surgery(app, surgery, action);
    setup_truncate(app, truncate_params, action);
    setup_pseudospec(app, pseudospec, action);
    setup_scatter(app, scatter, action);

    try {
        std::vector<std::string> args =
            expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (action)
            action();
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
