#include "nearnormal/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <vector>

#ifndef NEARNORMAL_VERSION
#define NEARNORMAL_VERSION "0.0.0"
#endif

namespace nearnormal {

namespace {

constexpr const char* kMatrixFormat = "nearnormal-matrix";
constexpr int kMatrixFormatVersion = 1;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

double number_from_json(const Json& j, const char* what)
{
    if (!j.is_number())
        throw std::invalid_argument(std::string(what) + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": non-finite value");
    return v;
}

} // namespace

static MatrixFile parse_matrix_json(const Json& doc);

const char* artifact_version() { return NEARNORMAL_VERSION; }

Json artifact_header()
{
    return Json{{"name", kArtifactName}, {"version", artifact_version()}};
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j)
{
    if (j.is_number())
        return {number_from_json(j, "complex"), 0.0};
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex: expected [re, im]");
    return {number_from_json(j[0], "complex"), number_from_json(j[1], "complex")};
}

Json matrix_to_json(const CMatrix& a)
{
    require_finite(a, "matrix_to_json");
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(complex_to_json(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const Json& j)
{
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("matrix data: expected a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    CMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw std::invalid_argument("matrix data: row " + std::to_string(r) +
                                        " does not have " + std::to_string(n) + " entries");
        for (Eigen::Index c = 0; c < n; ++c)
            a(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return a;
}

std::string serialize_matrix_file(const MatrixFile& file)
{
    require_square(file.matrix, "serialize_matrix_file");
    Json meta = {{"name", file.metadata.name},
                 {"generator", file.metadata.generator},
                 {"config", file.metadata.config},
                 {"properties", file.metadata.properties},
                 {"artifact", artifact_header()}};
    if (file.metadata.seed)
        meta["seed"] = *file.metadata.seed;
    Json doc = {{"format", kMatrixFormat},
                {"format_version", kMatrixFormatVersion},
                {"dim", file.matrix.rows()},
                {"data", matrix_to_json(file.matrix)},
                {"metadata", std::move(meta)}};
    return doc.dump() + "\n";
}

MatrixFile parse_matrix_file(std::string_view text)
{
    try {
        return parse_matrix_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("matrix file: ") + e.what());
    }
}
static MatrixFile parse_matrix_json(const Json& doc)
{
    if (!doc.is_object())
        throw std::invalid_argument("matrix file: expected a JSON object");
    if (doc.contains("format") && doc["format"] != kMatrixFormat)
        throw std::invalid_argument("matrix file: unknown format");
    if (!doc.contains("data"))
        throw std::invalid_argument("matrix file: missing data");

    MatrixFile file;
    file.matrix = matrix_from_json(doc["data"]);
    if (doc.contains("dim")) {
        if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() != file.matrix.rows())
            throw std::invalid_argument("matrix file: dim does not match data");
    }
    if (doc.contains("metadata")) {
        const Json& meta = doc["metadata"];
        if (!meta.is_object())
            throw std::invalid_argument("matrix file: metadata must be an object");
        file.metadata.name = meta.value("name", "");
        file.metadata.generator = meta.value("generator", "");
        if (meta.contains("seed"))
            file.metadata.seed = meta["seed"].get<std::uint64_t>();
        if (meta.contains("config"))
            file.metadata.config = meta["config"];
        if (meta.contains("properties"))
            file.metadata.properties = meta["properties"];
    }
    return file;
}

CMatrix parse_csv_matrix(std::string_view text)
{
    std::vector<std::vector<Complex>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        std::vector<Complex> row;
        std::string cell;
        auto flush = [&] {
            if (!cell.empty())
                row.push_back(parse_complex(cell));
            cell.clear();
        };
        for (char ch : t) {
            if (ch == ';' || std::isspace(static_cast<unsigned char>(ch)))
                flush();
            else
                cell.push_back(ch);
        }
        flush();
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0)
        throw std::invalid_argument("csv matrix: no rows");
    CMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != n)
            throw std::invalid_argument("csv matrix: row " + std::to_string(r) + " has " +
                                        std::to_string(row.size()) + " cells, expected " +
                                        std::to_string(n));
        for (Eigen::Index c = 0; c < n; ++c)
            a(r, c) = row[static_cast<std::size_t>(c)];
    }
    require_finite(a, "csv matrix");
    return a;
}

MatrixFile load_matrix(const std::string& path)
{
    const std::string text = read_text(path);
    const std::string_view t = trim(text);
    if (!t.empty() && t.front() == '{')
        return parse_matrix_file(t);
    MatrixFile file;
    file.matrix = parse_csv_matrix(t);
    return file;
}

void save_matrix(const std::string& path, const MatrixFile& file)
{
    write_text(path, serialize_matrix_file(file));
}

Cover parse_cover(const Json& j)
{
    if (!j.is_object() || !j.contains("regions") || !j["regions"].is_array())
        throw std::invalid_argument("cover: expected {\"regions\": [...]}");
    Cover cover;
    for (const Json& r : j["regions"]) {
        if (!r.is_object() || !r.contains("kind") || !r.contains("center"))
            throw std::invalid_argument("cover: each region needs kind and center");
        const std::string kind = r["kind"].get<std::string>();
        const Complex center = complex_from_json(r["center"]);
        if (kind == "disc") {
            if (!r.contains("radius"))
                throw std::invalid_argument("cover: disc needs a radius");
            cover.regions.push_back(Region::disc(center, number_from_json(r["radius"], "radius")));
        } else if (kind == "square") {
            if (!r.contains("side"))
                throw std::invalid_argument("cover: square needs a side");
            cover.regions.push_back(Region::square(center, number_from_json(r["side"], "side")));
        } else {
            throw std::invalid_argument("cover: unknown region kind '" + kind + "'");
        }
    }
    if (cover.regions.empty())
        throw std::invalid_argument("cover: no regions");
    return cover;
}

Cover load_cover(const std::string& path)
{
    try {
        return parse_cover(Json::parse(read_text(path)));
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("cover file: ") + e.what());
    }
}

double parse_real(std::string_view text)
{
    const std::string_view t = trim(text);
    std::string_view body = t;
    if (!body.empty() && body.front() == '+')
        body.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (body.empty() || ec != std::errc() || end != body.data() + body.size() || std::isnan(v))
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

Complex parse_complex(std::string_view text)
{
    const auto comma = text.find(',');
    if (comma == std::string_view::npos)
        return {parse_real(text), 0.0};
    return {parse_real(text.substr(0, comma)), parse_real(text.substr(comma + 1))};
}

std::string read_text(const std::string& path)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open '" + path + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& content)
{
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::invalid_argument("cannot open '" + path + "' for writing");
    out << content;
    if (!out)
        throw std::invalid_argument("write to '" + path + "' failed");
}

} // namespace nearnormal
