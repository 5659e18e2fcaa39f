#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nearnormal/linalg.hpp"
#include "nearnormal/partition.hpp"

namespace nearnormal {

using Json = nlohmann::json;

inline constexpr const char* kArtifactName = "nearnormal";
const char* artifact_version();

/// {"name": ..., "version": ...}
Json artifact_header();

struct MatrixMetadata {
    std::string name;
    std::optional<std::uint64_t> seed;
    std::string generator;
    Json config = Json::object();      ///< resolved run configuration, free-form
    Json properties = Json::object();  ///< generator-certified quantities
};

struct MatrixFile {
    CMatrix matrix;
    MatrixMetadata metadata;
};

Json complex_to_json(Complex z);
/// Accepts [re, im] or a bare number.
Complex complex_from_json(const Json& j);

/// Rows of [re, im] pairs.
Json matrix_to_json(const CMatrix& a);
/// Throws std::invalid_argument for ragged, non-square or non-numeric data.
CMatrix matrix_from_json(const Json& j);

/// One JSON object on a single line, newline terminated. Doubles are written
/// in shortest round-trip form, so parsing restores every entry bit for bit.
std::string serialize_matrix_file(const MatrixFile& file);
MatrixFile parse_matrix_file(std::string_view text);

/// Plain text: one row per line, cells "re,im" or "re" separated by
/// whitespace or ';'. Blank lines and lines starting with '#' are skipped.
CMatrix parse_csv_matrix(std::string_view text);

/// JSON when the first non-blank character is '{', CSV otherwise.
MatrixFile load_matrix(const std::string& path);
void save_matrix(const std::string& path, const MatrixFile& file);

/// {"regions": [{"kind": "disc", "center": [re, im], "radius": r},
///              {"kind": "square", "center": [re, im], "side": s}, ...]}
Cover parse_cover(const Json& j);
Cover load_cover(const std::string& path);

/// "re,im" or "re"; "inf" and "-inf" are accepted for reals.
Complex parse_complex(std::string_view text);
double parse_real(std::string_view text);

/// "-" means stdin / stdout. Failures throw std::invalid_argument.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

} // namespace nearnormal
