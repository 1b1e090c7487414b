#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dg/matrix.hpp"

namespace dg {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Strict double parser; the entire token must be consumed.
double parse_double(const std::string& token, const char* op);

// Comma-separated matrix: one row per line, '.' decimal separator, no header.
// Ragged rows and non-numeric fields are rejected.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix parse_matrix_csv(const std::string& text, const std::string& origin);
std::string matrix_to_csv(const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

// Whole-file text helpers. Writes go to a temporary file in the target
// directory and are renamed into place so readers never observe a partial
// artifact.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

// Splits on a separator, keeping empty fields.
std::vector<std::string> split(const std::string& line, char sep);

// Trims ASCII whitespace from both ends.
std::string trim(const std::string& s);

}  // namespace dg
