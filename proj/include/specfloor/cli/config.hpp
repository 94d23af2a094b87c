#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specfloor/certifier.hpp"
#include "specfloor/covmodels.hpp"
#include "specfloor/designs.hpp"
#include "specfloor/errors.hpp"

namespace specfloor::cli {

// Configuration error with a 1-based source position (0 when unknown).
class ParseError : public Error {
public:
  ParseError(const std::string &what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

struct LatentSpec {
  std::string kind = "exponential";
  double variance = 1.0;
  double range = 1.0;
  double smoothness = 0.5;
  bool operator==(const LatentSpec &) const = default;
};

struct ComponentSpec {
  std::vector<std::vector<double>> coregionalization;
  LatentSpec latent;
  bool operator==(const ComponentSpec &) const = default;
};

struct ModelSpec {
  int d = 1;
  int p = 0; // resolved from the coregionalization rows
  std::vector<ComponentSpec> components;
  std::optional<double> decay_A;
  std::optional<double> decay_tau;
  bool operator==(const ModelSpec &) const = default;
};

struct DesignSpec {
  std::string kind = "grid"; // grid | random | file
  int d = 1;
  std::vector<std::size_t> counts;
  double spacing = 1.0;
  std::vector<std::vector<double>> offsets; // grid; empty = collocated
  double delta = 1.0;                       // random
  std::vector<double> region_lower;         // random
  std::vector<double> region_upper;         // random
  std::uint64_t seed = 0;                   // random
  std::string path;                         // file
  bool operator==(const DesignSpec &) const = default;
};

struct CertifySpec {
  std::string mode = "design"; // design | family
  std::size_t spectral_resolution = 0;
  int extra_rungs = 4;
  int max_doublings = 40;
  double support_radius = 1.0;
  double envelope_exponent = 0.0;
  bool inversion_audit = false;
  double inversion_tol = 1e-6;
  std::size_t eigen_cap = 2000;
  bool operator==(const CertifySpec &) const = default;
};

// Parameter family for uniform certification: one latent parameter of one
// component takes each listed value.
struct FamilySpec {
  std::string parameter = "range"; // range | variance | smoothness
  std::size_t component = 0;
  std::vector<double> values;
  bool operator==(const FamilySpec &) const = default;
};

struct TaperSpec {
  std::string kind = "wendland"; // wendland | identity | ones
  double range = 3.0;
  bool operator==(const TaperSpec &) const = default;
};

struct RunConfig {
  ModelSpec model;
  DesignSpec design;
  CertifySpec certify;
  std::optional<FamilySpec> family;
  TaperSpec taper;
  std::vector<std::size_t> n_list;
  std::string output_dir;
  bool operator==(const RunConfig &) const = default;
};

RunConfig parse_config(const std::string &path);
RunConfig parse_config_text(const std::string &text);

// YAML text that parse_config_text maps back to an equal RunConfig.
std::string emit_config(const RunConfig &config);

MatrixCovarianceModel build_model(const ModelSpec &spec);
MatrixCovarianceModel build_model_with(const ModelSpec &spec, const FamilySpec &family,
                                       double value);
// `counts_override`, when non-empty, replaces every process count.
Design build_design(const DesignSpec &spec, std::size_t counts_override = 0);
CertifyOptions build_certify_options(const CertifySpec &spec);

} // namespace specfloor::cli
