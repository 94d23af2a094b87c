#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "specfloor/certifier.hpp"
#include "specfloor/cli/config.hpp"

namespace specfloor::cli {

using Json = nlohmann::json;

// Deterministic text: keys sorted, floats with 17 significant digits,
// non-finite floats as null, two-space indentation.
std::string to_json_text(const Json &value);

// Rows of already formatted fields under a fixed header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv_text(const CsvTable &table);
// 17 significant digits; empty for NaN.
std::string csv_number(double value);

// Writes `text` to `path`, throwing std::runtime_error when unwritable.
void write_text_file(const std::string &path, const std::string &text);

// format is "json" (value must be a Json) or "csv".
void emit_report(const Json &report, const std::string &format, const std::string &path);
void emit_report(const CsvTable &table, const std::string &format, const std::string &path);

Json config_to_json(const RunConfig &config);
Json bound_to_json(const CertifiedBound &bound);
Json vector_json(const std::vector<double> &values);

} // namespace specfloor::cli
