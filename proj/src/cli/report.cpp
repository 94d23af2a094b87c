#include "specfloor/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specfloor::cli {

namespace {

std::string format_double(double value) {
  if (!std::isfinite(value))
    return "null";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  std::string text = buffer;
  // Keep floats recognisable as floats.
  if (text.find_first_of(".eE") == std::string::npos)
    text += ".0";
  return text;
}

void write(std::ostringstream &out, const Json &value, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (value.type()) {
  case Json::value_t::object: {
    if (value.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (!first)
        out << ",\n";
      first = false;
      out << pad << Json(it.key()).dump() << ": ";
      write(out, it.value(), depth + 1);
    }
    out << "\n" << close << "}";
    return;
  }
  case Json::value_t::array: {
    if (value.empty()) {
      out << "[]";
      return;
    }
    bool scalars = true;
    for (const auto &item : value)
      scalars = scalars && !item.is_structured();
    if (scalars) {
      out << "[";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i)
          out << ", ";
        write(out, value[i], depth + 1);
      }
      out << "]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (i)
        out << ",\n";
      out << pad;
      write(out, value[i], depth + 1);
    }
    out << "\n" << close << "]";
    return;
  }
  case Json::value_t::number_float:
    out << format_double(value.get<double>());
    return;
  default:
    out << value.dump();
  }
}

} // namespace

std::string to_json_text(const Json &value) {
  std::ostringstream out;
  write(out, value, 0);
  out << "\n";
  return out.str();
}

std::string csv_number(double value) {
  if (std::isnan(value))
    return "";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string to_csv_text(const CsvTable &table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto &row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out)
    throw std::runtime_error("failed writing '" + path + "'");
}

void emit_report(const Json &report, const std::string &format, const std::string &path) {
  if (format != "json")
    throw std::invalid_argument("a JSON report cannot be written as '" + format + "'");
  write_text_file(path, to_json_text(report));
}

void emit_report(const CsvTable &table, const std::string &format, const std::string &path) {
  if (format != "csv")
    throw std::invalid_argument("a table cannot be written as '" + format + "'");
  write_text_file(path, to_csv_text(table));
}

Json vector_json(const std::vector<double> &values) {
  Json out = Json::array();
  for (double v : values)
    out.push_back(v);
  return out;
}

namespace {

Json matrix_json(const std::vector<std::vector<double>> &rows) {
  Json out = Json::array();
  for (const auto &row : rows)
    out.push_back(vector_json(row));
  return out;
}

} // namespace

Json config_to_json(const RunConfig &config) {
  Json model;
  model["d"] = config.model.d;
  model["p"] = config.model.p;
  model["components"] = Json::array();
  for (const auto &comp : config.model.components) {
    Json latent{{"kind", comp.latent.kind},
                {"variance", comp.latent.variance},
                {"range", comp.latent.range},
                {"smoothness", comp.latent.smoothness}};
    model["components"].push_back(
        Json{{"coregionalization", matrix_json(comp.coregionalization)}, {"latent", latent}});
  }
  if (config.model.decay_A)
    model["decay"] = Json{{"A", *config.model.decay_A}, {"tau", *config.model.decay_tau}};
  else
    model["decay"] = nullptr;

  const DesignSpec &ds = config.design;
  Json design{{"kind", ds.kind}, {"d", ds.d}};
  if (ds.kind == "file") {
    design["path"] = ds.path;
  } else {
    design["counts"] = ds.counts;
    if (ds.kind == "grid") {
      design["spacing"] = ds.spacing;
      design["offsets"] = matrix_json(ds.offsets);
    } else {
      design["delta"] = ds.delta;
      design["seed"] = ds.seed;
      design["region"] =
          Json{{"lower", vector_json(ds.region_lower)}, {"upper", vector_json(ds.region_upper)}};
    }
  }

  const CertifySpec &cs = config.certify;
  Json certify{{"mode", cs.mode},
               {"spectral_resolution", cs.spectral_resolution},
               {"extra_rungs", cs.extra_rungs},
               {"max_doublings", cs.max_doublings},
               {"support_radius", cs.support_radius},
               {"envelope_exponent", cs.envelope_exponent},
               {"inversion_audit", cs.inversion_audit},
               {"inversion_tol", cs.inversion_tol},
               {"eigen_cap", cs.eigen_cap}};

  Json out{{"model", model},
           {"design", design},
           {"certify", certify},
           {"taper", Json{{"kind", config.taper.kind}, {"range", config.taper.range}}},
           {"sweep", Json{{"n_list", config.n_list}}},
           {"output", Json{{"dir", config.output_dir}}}};
  if (config.family)
    out["family"] = Json{{"parameter", config.family->parameter},
                         {"component", config.family->component},
                         {"values", vector_json(config.family->values)}};
  else
    out["family"] = nullptr;
  return out;
}

Json bound_to_json(const CertifiedBound &bound) {
  Json out{{"value", bound.value},
           {"h0", bound.h0},
           {"delta", bound.delta},
           {"delta2", bound.delta2},
           {"d", bound.d},
           {"rung", bound.rung},
           {"mode", to_string(bound.mode)},
           {"spectral_grid_resolution", bound.spectral_grid_resolution},
           {"row_sum_worst", bound.row_sum_worst},
           {"support_radius", bound.support_radius},
           {"hhat_max", bound.hhat_max},
           {"spectral_floor", bound.spectral_floor},
           {"spectral_argmin", vector_json(bound.spectral_argmin)},
           {"min_distance", bound.min_distance},
           {"window_profile", bound.window_profile},
           {"deviations", bound.deviations}};
  if (bound.envelope)
    out["envelope"] = Json{{"scale", bound.envelope->scale},
                           {"exponent", bound.envelope->exponent},
                           {"fitted_up_to", bound.envelope->fitted_up_to},
                           {"validation_samples", bound.envelope->validation_samples}};
  else
    out["envelope"] = nullptr;
  return out;
}

} // namespace specfloor::cli
