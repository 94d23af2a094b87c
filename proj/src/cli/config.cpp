#include "specfloor/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace specfloor::cli {

ParseError::ParseError(const std::string &what, int line, int column)
    : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"
                     : what),
      line_(line), column_(column) {}

namespace {

[[noreturn]] void fail_at(const YAML::Node &node, const std::string &what) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null())
    throw ParseError(what);
  throw ParseError(what, mark.line + 1, mark.column + 1);
}

void require_map(const YAML::Node &node, const std::string &where) {
  if (!node.IsMap())
    fail_at(node, "'" + where + "' must be a mapping");
}

void reject_unknown(const YAML::Node &node, const std::string &where,
                    const std::set<std::string> &allowed) {
  for (const auto &entry : node) {
    const std::string key = entry.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto &name : allowed)
        list += (list.empty() ? "" : ", ") + name;
      fail_at(entry.first, "unknown key '" + key + "' in " + where + " (allowed: " +
                               list + ")");
    }
  }
}

template <class T> T scalar(const YAML::Node &node, const std::string &key) {
  if (!node.IsScalar())
    fail_at(node, "'" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion &) {
    fail_at(node, "type mismatch for '" + key + "': cannot read '" + node.Scalar() + "'");
  }
}

double real(const YAML::Node &node, const std::string &key) {
  const double value = scalar<double>(node, key);
  if (!std::isfinite(value))
    fail_at(node, "'" + key + "' must be finite");
  return value;
}

std::size_t count(const YAML::Node &node, const std::string &key) {
  const long long value = scalar<long long>(node, key);
  if (value < 0)
    fail_at(node, "'" + key + "' must be nonnegative");
  return static_cast<std::size_t>(value);
}

std::vector<double> real_list(const YAML::Node &node, const std::string &key) {
  if (!node.IsSequence())
    fail_at(node, "'" + key + "' must be a list");
  std::vector<double> out;
  for (const auto &item : node)
    out.push_back(real(item, key));
  return out;
}

std::vector<std::size_t> count_list(const YAML::Node &node, const std::string &key) {
  if (!node.IsSequence())
    fail_at(node, "'" + key + "' must be a list");
  std::vector<std::size_t> out;
  for (const auto &item : node)
    out.push_back(count(item, key));
  return out;
}

std::vector<std::vector<double>> real_matrix(const YAML::Node &node, const std::string &key) {
  if (!node.IsSequence())
    fail_at(node, "'" + key + "' must be a list of rows");
  std::vector<std::vector<double>> out;
  for (const auto &row : node)
    out.push_back(real_list(row, key));
  return out;
}

std::string choice(const YAML::Node &node, const std::string &key,
                   const std::set<std::string> &options) {
  const std::string value = scalar<std::string>(node, key);
  if (!options.count(value)) {
    std::string list;
    for (const auto &name : options)
      list += (list.empty() ? "" : ", ") + name;
    fail_at(node, "'" + key + "' must be one of " + list + ", got '" + value + "'");
  }
  return value;
}

LatentSpec parse_latent(const YAML::Node &node) {
  require_map(node, "latent");
  reject_unknown(node, "latent", {"kind", "variance", "range", "smoothness"});
  LatentSpec spec;
  if (!node["kind"])
    fail_at(node, "latent is missing 'kind'");
  spec.kind = choice(node["kind"], "kind", {"matern", "exponential", "gaussian", "triangular"});
  if (node["variance"])
    spec.variance = real(node["variance"], "variance");
  if (node["range"])
    spec.range = real(node["range"], "range");
  if (node["smoothness"])
    spec.smoothness = real(node["smoothness"], "smoothness");
  if (spec.kind == "exponential")
    spec.smoothness = 0.5;
  else if (spec.kind == "matern" && !node["smoothness"])
    fail_at(node, "matern latent needs 'smoothness'");
  else if (spec.kind != "matern")
    spec.smoothness = 0.5;
  if (spec.variance < 0)
    fail_at(node["variance"], "variance must be nonnegative");
  if (spec.range <= 0)
    fail_at(node["range"] ? node["range"] : node, "range must be positive");
  if (spec.smoothness <= 0)
    fail_at(node["smoothness"], "smoothness must be positive");
  return spec;
}

ModelSpec parse_model(const YAML::Node &node) {
  require_map(node, "model");
  reject_unknown(node, "model", {"d", "p", "components", "decay"});
  ModelSpec spec;
  if (node["d"])
    spec.d = static_cast<int>(count(node["d"], "d"));
  if (spec.d < 1)
    fail_at(node["d"], "model.d must be at least 1");
  const YAML::Node comps = node["components"];
  if (!comps || !comps.IsSequence() || comps.size() == 0)
    fail_at(comps ? comps : node, "model needs a nonempty 'components' list");
  for (const auto &c : comps) {
    require_map(c, "component");
    reject_unknown(c, "component", {"coregionalization", "latent"});
    ComponentSpec comp;
    if (c["coregionalization"]) {
      comp.coregionalization = real_matrix(c["coregionalization"], "coregionalization");
      if (comp.coregionalization.empty())
        fail_at(c["coregionalization"], "coregionalization must have at least one row");
      const std::size_t cols = comp.coregionalization.front().size();
      for (const auto &row : comp.coregionalization)
        if (row.size() != cols || cols == 0)
          fail_at(c["coregionalization"], "coregionalization rows must have equal, nonzero length");
    } else {
      comp.coregionalization = {{1.0}};
    }
    if (!c["latent"])
      fail_at(c, "component is missing 'latent'");
    comp.latent = parse_latent(c["latent"]);
    if (comp.latent.kind == "triangular" && spec.d != 1)
      fail_at(c["latent"], "triangular latent is only valid for d = 1");
    spec.components.push_back(std::move(comp));
  }
  const std::size_t p = spec.components.front().coregionalization.size();
  for (std::size_t r = 0; r < spec.components.size(); ++r)
    if (spec.components[r].coregionalization.size() != p)
      fail_at(comps[r], "components disagree on the number of processes");
  spec.p = static_cast<int>(p);
  if (node["p"]) {
    const auto declared = count(node["p"], "p");
    if (declared != p)
      fail_at(node["p"], "model.p = " + std::to_string(declared) +
                             " but coregionalization has " + std::to_string(p) + " rows");
  }
  if (const YAML::Node decay = node["decay"]) {
    require_map(decay, "decay");
    reject_unknown(decay, "decay", {"A", "tau"});
    if (decay["A"])
      spec.decay_A = real(decay["A"], "A");
    if (decay["tau"])
      spec.decay_tau = real(decay["tau"], "tau");
    if (spec.decay_A.has_value() != spec.decay_tau.has_value())
      fail_at(decay, "decay needs both 'A' and 'tau'");
  }
  return spec;
}

DesignSpec parse_design(const YAML::Node &node, const ModelSpec &model) {
  require_map(node, "design");
  reject_unknown(node, "design", {"kind", "d", "counts", "spacing", "offsets", "delta",
                                  "region", "seed", "path"});
  DesignSpec spec;
  spec.d = model.d;
  if (node["kind"])
    spec.kind = choice(node["kind"], "kind", {"grid", "random", "file"});
  if (node["d"]) {
    spec.d = static_cast<int>(count(node["d"], "d"));
    if (spec.d != model.d)
      fail_at(node["d"], "dimension mismatch: model.d = " + std::to_string(model.d) +
                             ", design.d = " + std::to_string(spec.d));
  }
  auto forbid = [&](const char *key) {
    if (node[key])
      fail_at(node[key], std::string("'") + key + "' does not apply to a " + spec.kind +
                             " design");
  };
  if (spec.kind == "file") {
    for (const char *key : {"counts", "spacing", "offsets", "delta", "region", "seed"})
      forbid(key);
    if (!node["path"])
      fail_at(node, "file design needs 'path'");
    spec.path = scalar<std::string>(node["path"], "path");
    return spec;
  }
  forbid("path");
  if (!node["counts"])
    fail_at(node, "design needs 'counts'");
  spec.counts = count_list(node["counts"], "counts");
  if (spec.counts.size() != static_cast<std::size_t>(model.p))
    fail_at(node["counts"], "design has " + std::to_string(spec.counts.size()) +
                                " processes but model.p = " + std::to_string(model.p));
  for (std::size_t c : spec.counts)
    if (c == 0)
      fail_at(node["counts"], "every process needs at least one point");
  if (spec.kind == "grid") {
    for (const char *key : {"delta", "region", "seed"})
      forbid(key);
    if (node["spacing"])
      spec.spacing = real(node["spacing"], "spacing");
    if (spec.spacing <= 0)
      fail_at(node["spacing"], "spacing must be positive");
    if (node["offsets"]) {
      spec.offsets = real_matrix(node["offsets"], "offsets");
      if (spec.offsets.size() != spec.counts.size())
        fail_at(node["offsets"], "offsets needs one row per process");
      for (const auto &row : spec.offsets)
        if (row.size() != static_cast<std::size_t>(spec.d))
          fail_at(node["offsets"], "offset rows must have d entries");
    }
    return spec;
  }
  for (const char *key : {"spacing", "offsets"})
    forbid(key);
  if (node["delta"])
    spec.delta = real(node["delta"], "delta");
  if (spec.delta <= 0)
    fail_at(node["delta"], "delta must be positive");
  if (node["seed"])
    spec.seed = scalar<std::uint64_t>(node["seed"], "seed");
  if (const YAML::Node region = node["region"]) {
    require_map(region, "region");
    reject_unknown(region, "region", {"lower", "upper"});
    if (!region["lower"] || !region["upper"])
      fail_at(region, "region needs 'lower' and 'upper'");
    spec.region_lower = real_list(region["lower"], "lower");
    spec.region_upper = real_list(region["upper"], "upper");
    if (spec.region_lower.size() != static_cast<std::size_t>(spec.d) ||
        spec.region_upper.size() != static_cast<std::size_t>(spec.d))
      fail_at(region, "region bounds must have d entries");
    for (int j = 0; j < spec.d; ++j)
      if (!(spec.region_lower[j] < spec.region_upper[j]))
        fail_at(region, "region lower must be below upper");
  } else {
    // Cube with room for roughly twice the largest count at spacing delta.
    const std::size_t n = *std::max_element(spec.counts.begin(), spec.counts.end());
    const double side =
        spec.delta * std::ceil(std::pow(2.0 * static_cast<double>(n), 1.0 / spec.d)) * 2.0;
    spec.region_lower.assign(spec.d, 0.0);
    spec.region_upper.assign(spec.d, side);
  }
  return spec;
}

CertifySpec parse_certify(const YAML::Node &node) {
  require_map(node, "certify");
  reject_unknown(node, "certify", {"mode", "spectral_resolution", "extra_rungs",
                                   "max_doublings", "support_radius", "envelope_exponent",
                                   "inversion_audit", "inversion_tol", "eigen_cap"});
  CertifySpec spec;
  if (node["mode"])
    spec.mode = choice(node["mode"], "mode", {"design", "family"});
  if (node["spectral_resolution"])
    spec.spectral_resolution = count(node["spectral_resolution"], "spectral_resolution");
  if (node["extra_rungs"])
    spec.extra_rungs = static_cast<int>(count(node["extra_rungs"], "extra_rungs"));
  if (node["max_doublings"])
    spec.max_doublings = static_cast<int>(count(node["max_doublings"], "max_doublings"));
  if (node["support_radius"])
    spec.support_radius = real(node["support_radius"], "support_radius");
  if (spec.support_radius <= 0)
    fail_at(node["support_radius"], "support_radius must be positive");
  if (node["envelope_exponent"])
    spec.envelope_exponent = real(node["envelope_exponent"], "envelope_exponent");
  if (node["inversion_audit"])
    spec.inversion_audit = scalar<bool>(node["inversion_audit"], "inversion_audit");
  if (node["inversion_tol"])
    spec.inversion_tol = real(node["inversion_tol"], "inversion_tol");
  if (spec.inversion_tol <= 0)
    fail_at(node["inversion_tol"], "inversion_tol must be positive");
  if (node["eigen_cap"])
    spec.eigen_cap = count(node["eigen_cap"], "eigen_cap");
  return spec;
}

FamilySpec parse_family(const YAML::Node &node, const ModelSpec &model) {
  require_map(node, "family");
  reject_unknown(node, "family", {"parameter", "component", "values"});
  FamilySpec spec;
  if (node["parameter"])
    spec.parameter = choice(node["parameter"], "parameter", {"range", "variance", "smoothness"});
  if (node["component"])
    spec.component = count(node["component"], "component");
  if (spec.component >= model.components.size())
    fail_at(node["component"], "family.component is out of range (zero-based)");
  if (!node["values"])
    fail_at(node, "family needs 'values'");
  spec.values = real_list(node["values"], "values");
  if (spec.values.empty())
    fail_at(node["values"], "family.values must be nonempty");
  if (spec.parameter == "smoothness" && model.components[spec.component].latent.kind != "matern")
    fail_at(node["parameter"], "smoothness can only vary for a matern latent");
  return spec;
}

TaperSpec parse_taper(const YAML::Node &node, int d) {
  require_map(node, "taper");
  reject_unknown(node, "taper", {"kind", "range"});
  TaperSpec spec;
  if (node["kind"])
    spec.kind = choice(node["kind"], "kind", {"wendland", "identity", "ones"});
  if (node["range"])
    spec.range = real(node["range"], "range");
  if (spec.range <= 0)
    fail_at(node["range"], "taper range must be positive");
  if (spec.kind == "wendland" && d > 3)
    fail_at(node, "the wendland taper needs d <= 3");
  return spec;
}

RunConfig parse_root(const YAML::Node &root) {
  if (!root.IsMap())
    fail_at(root, "configuration must be a mapping");
  reject_unknown(root, "configuration",
                 {"model", "design", "certify", "family", "taper", "sweep", "output"});
  RunConfig config;
  if (!root["model"])
    throw ParseError("configuration is missing 'model'");
  config.model = parse_model(root["model"]);
  if (!root["design"])
    throw ParseError("configuration is missing 'design'");
  config.design = parse_design(root["design"], config.model);
  if (root["certify"])
    config.certify = parse_certify(root["certify"]);
  if (root["family"])
    config.family = parse_family(root["family"], config.model);
  if (root["taper"])
    config.taper = parse_taper(root["taper"], config.model.d);
  if (const YAML::Node sweep = root["sweep"]) {
    require_map(sweep, "sweep");
    reject_unknown(sweep, "sweep", {"n_list"});
    if (sweep["n_list"])
      config.n_list = count_list(sweep["n_list"], "n_list");
  }
  if (const YAML::Node output = root["output"]) {
    require_map(output, "output");
    reject_unknown(output, "output", {"dir"});
    if (output["dir"])
      config.output_dir = scalar<std::string>(output["dir"], "dir");
  }
  return config;
}

} // namespace

RunConfig parse_config_text(const std::string &text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException &error) {
    throw ParseError("malformed configuration: " + error.msg, error.mark.line + 1,
                     error.mark.column + 1);
  }
  return parse_root(root);
}

RunConfig parse_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open configuration file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

namespace {

void emit_list(YAML::Emitter &out, const std::vector<double> &values) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double v : values)
    out << v;
  out << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter &out, const std::vector<std::vector<double>> &rows) {
  out << YAML::BeginSeq;
  for (const auto &row : rows)
    emit_list(out, row);
  out << YAML::EndSeq;
}

} // namespace

std::string emit_config(const RunConfig &config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "d" << YAML::Value << config.model.d;
  out << YAML::Key << "p" << YAML::Value << config.model.p;
  out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
  for (const auto &comp : config.model.components) {
    out << YAML::BeginMap;
    out << YAML::Key << "coregionalization" << YAML::Value;
    emit_matrix(out, comp.coregionalization);
    out << YAML::Key << "latent" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << comp.latent.kind;
    out << YAML::Key << "variance" << YAML::Value << comp.latent.variance;
    out << YAML::Key << "range" << YAML::Value << comp.latent.range;
    out << YAML::Key << "smoothness" << YAML::Value << comp.latent.smoothness;
    out << YAML::EndMap << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (config.model.decay_A) {
    out << YAML::Key << "decay" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "A" << YAML::Value << *config.model.decay_A;
    out << YAML::Key << "tau" << YAML::Value << *config.model.decay_tau;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const DesignSpec &ds = config.design;
  out << YAML::Key << "design" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << ds.kind;
  out << YAML::Key << "d" << YAML::Value << ds.d;
  if (ds.kind == "file") {
    out << YAML::Key << "path" << YAML::Value << ds.path;
  } else {
    out << YAML::Key << "counts" << YAML::Value << YAML::Flow << ds.counts;
    if (ds.kind == "grid") {
      out << YAML::Key << "spacing" << YAML::Value << ds.spacing;
      if (!ds.offsets.empty()) {
        out << YAML::Key << "offsets" << YAML::Value;
        emit_matrix(out, ds.offsets);
      }
    } else {
      out << YAML::Key << "delta" << YAML::Value << ds.delta;
      out << YAML::Key << "seed" << YAML::Value << ds.seed;
      out << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "lower" << YAML::Value;
      emit_list(out, ds.region_lower);
      out << YAML::Key << "upper" << YAML::Value;
      emit_list(out, ds.region_upper);
      out << YAML::EndMap;
    }
  }
  out << YAML::EndMap;

  const CertifySpec &cs = config.certify;
  out << YAML::Key << "certify" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << cs.mode;
  out << YAML::Key << "spectral_resolution" << YAML::Value << cs.spectral_resolution;
  out << YAML::Key << "extra_rungs" << YAML::Value << cs.extra_rungs;
  out << YAML::Key << "max_doublings" << YAML::Value << cs.max_doublings;
  out << YAML::Key << "support_radius" << YAML::Value << cs.support_radius;
  out << YAML::Key << "envelope_exponent" << YAML::Value << cs.envelope_exponent;
  out << YAML::Key << "inversion_audit" << YAML::Value << cs.inversion_audit;
  out << YAML::Key << "inversion_tol" << YAML::Value << cs.inversion_tol;
  out << YAML::Key << "eigen_cap" << YAML::Value << cs.eigen_cap;
  out << YAML::EndMap;

  if (config.family) {
    out << YAML::Key << "family" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "parameter" << YAML::Value << config.family->parameter;
    out << YAML::Key << "component" << YAML::Value << config.family->component;
    out << YAML::Key << "values" << YAML::Value;
    emit_list(out, config.family->values);
    out << YAML::EndMap;
  }

  out << YAML::Key << "taper" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << config.taper.kind;
  out << YAML::Key << "range" << YAML::Value << config.taper.range;
  out << YAML::EndMap;

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_list" << YAML::Value << YAML::Flow << config.n_list;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << config.output_dir;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

MatrixCovarianceModel build_model(const ModelSpec &spec) {
  std::vector<LmcComponent> components;
  for (const auto &comp : spec.components) {
    const std::size_t rows = comp.coregionalization.size();
    const std::size_t cols = comp.coregionalization.front().size();
    Eigen::MatrixXd a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        a(i, j) = comp.coregionalization[i][j];
    components.push_back(
        {a, make_isotropic(cov_kind_from_string(comp.latent.kind), comp.latent.variance,
                           comp.latent.range, comp.latent.smoothness)});
  }
  MatrixCovarianceModel model = make_lmc(std::move(components), spec.d);
  if (spec.decay_A)
    return model.with_decay(*spec.decay_A, *spec.decay_tau);
  return model;
}

MatrixCovarianceModel build_model_with(const ModelSpec &spec, const FamilySpec &family,
                                       double value) {
  ModelSpec copy = spec;
  LatentSpec &latent = copy.components.at(family.component).latent;
  if (family.parameter == "range")
    latent.range = value;
  else if (family.parameter == "variance")
    latent.variance = value;
  else
    latent.smoothness = value;
  // A declared envelope belongs to one parameter value; each member gets its own.
  copy.decay_A.reset();
  copy.decay_tau.reset();
  return build_model(copy);
}

Design build_design(const DesignSpec &spec, std::size_t counts_override) {
  if (spec.kind == "file") {
    if (counts_override)
      throw ParseError("file designs cannot be resized for a sweep");
    std::ifstream in(spec.path);
    if (!in)
      throw ParseError("cannot open design file '" + spec.path + "'");
    Design design = read_design_table(in);
    if (design.d() != spec.d)
      throw ParseError("design file '" + spec.path + "' has d = " +
                       std::to_string(design.d()) + ", expected " + std::to_string(spec.d));
    return design;
  }
  std::vector<std::size_t> counts = spec.counts;
  if (counts_override)
    std::fill(counts.begin(), counts.end(), counts_override);
  if (spec.kind == "grid")
    return make_grid_design(spec.d, counts, spec.spacing, spec.offsets);
  return make_random_min_dist(spec.d, counts, spec.delta,
                              Region{spec.region_lower, spec.region_upper}, spec.seed);
}

CertifyOptions build_certify_options(const CertifySpec &spec) {
  CertifyOptions options;
  options.mode = spec.mode == "family" ? CertifyMode::family_certified
                                       : CertifyMode::design_certified;
  options.support_radius = spec.support_radius;
  options.spectral_resolution = spec.spectral_resolution;
  options.extra_rungs = spec.extra_rungs;
  options.max_doublings = spec.max_doublings;
  options.envelope_exponent = spec.envelope_exponent;
  options.audit_inversion = spec.inversion_audit;
  options.inversion_tol = spec.inversion_tol;
  return options;
}

} // namespace specfloor::cli
