#include "specfloor/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "specfloor/certifier.hpp"
#include "specfloor/matrixops.hpp"
#include "specfloor/parallel.hpp"
#include "specfloor/spectral.hpp"
#include "specfloor/window.hpp"

namespace specfloor::cli {

const std::vector<std::string> &command_names() {
  static const std::vector<std::string> names{"audit", "certify", "spectrum",
                                              "sweep", "counterexample", "taper"};
  return names;
}

namespace {

constexpr double kFloorTolerance = 1e-12;

Json nullable(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

std::string stage_name(FailureStage stage) {
  switch (stage) {
  case FailureStage::decay:
    return "decay";
  case FailureStage::spectral:
    return "spectral";
  case FailureStage::min_distance:
    return "min_distance";
  case FailureStage::row_sum:
    return "row_sum";
  case FailureStage::envelope:
    return "envelope";
  }
  return "unknown";
}

void check_model_design(const MatrixCovarianceModel &model, const Design &design) {
  if (model.p() != design.process_count())
    throw ParseError("model.p = " + std::to_string(model.p()) + " but the design has " +
                     std::to_string(design.process_count()) + " processes");
  if (model.d() != design.d())
    throw ParseError("dimension mismatch: model.d = " + std::to_string(model.d()) +
                     ", design.d = " + std::to_string(design.d()));
}

Json decay_section(const MatrixCovarianceModel &model) {
  const auto samples = certify_lag_samples(model);
  const AuditReport report = decay_audit(model, samples);
  return Json{{"pass", report.pass},
              {"worst_margin", report.worst_margin},
              {"worst_lag", vector_json(report.worst_lag)},
              {"worst_entry", Json::array({report.worst_k + 1, report.worst_l + 1})},
              {"samples", report.samples},
              {"failures", report.failures},
              {"A", model.decay_A()},
              {"tau", model.decay_tau()}};
}

Json min_distance_section(const Design &design) {
  try {
    const MinDistanceReport report = min_distance(design);
    Json per = Json::array();
    for (double v : report.per_process)
      per.push_back(nullable(v));
    return Json{{"pass", true}, {"per_process", per}, {"overall", nullable(report.overall)}};
  } catch (const ZeroDistanceError &error) {
    return Json{{"pass", false}, {"reason", error.what()}, {"process", error.process() + 1}};
  }
}

// Spectral floor over the box of the first rung passing the row-sum test.
Json spectral_section(const MatrixCovarianceModel &model, const Design &design,
                      const CertifyOptions &options) {
  const Window window = build_window(model.d(), options.support_radius);
  const std::size_t resolution = options.resolution_for(model.d());
  DeltaChoice choice;
  try {
    choice = find_delta(window, design, options.max_doublings);
  } catch (const Error &error) {
    return Json{{"pass", false}, {"reason", error.what()}, {"resolution", resolution}};
  }
  const double half_width = choice.delta * options.support_radius;
  const SpectralFloor floor =
      spectral_floor(model, FrequencyBox::symmetric(model.d(), half_width), resolution);
  return Json{{"pass", floor.value > kFloorTolerance},
              {"floor", floor.value},
              {"argmin", vector_json(floor.argmin)},
              {"resolution", floor.resolution},
              {"box_half_width", half_width},
              {"delta", choice.delta}};
}

Json inversion_section(const MatrixCovarianceModel &model, double tol) {
  std::vector<std::vector<double>> lags;
  for (double t : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    std::vector<double> lag(static_cast<std::size_t>(model.d()), 0.0);
    lag[0] = t;
    lags.push_back(std::move(lag));
  }
  const AuditReport report = inversion_audit(model, lags, tol);
  return Json{{"pass", report.pass},
              {"tol", tol},
              {"worst_margin", report.worst_margin},
              {"worst_lag", vector_json(report.worst_lag)},
              {"samples", report.samples}};
}

Json assumptions(const MatrixCovarianceModel &model, const Design &design,
                 const RunConfig &config) {
  const CertifyOptions options = build_certify_options(config.certify);
  Json out{{"decay", decay_section(model)},
           {"min_distance", min_distance_section(design)},
           {"spectral", spectral_section(model, design, options)}};
  if (config.certify.inversion_audit)
    out["inversion"] = inversion_section(model, config.certify.inversion_tol);
  return out;
}

bool assumptions_pass(const Json &section) {
  for (const auto &item : section)
    if (!item.at("pass").get<bool>())
      return false;
  return true;
}

Json failure_json(const CertificationFailure &failure) {
  Json out{{"stage", stage_name(failure.stage())},
           {"location", vector_json(failure.location())}};
  out["theta"] = failure.theta().empty() ? Json(nullptr) : vector_json(failure.theta());
  return out;
}

double sigma_lambda1(const MatrixCovarianceModel &model, const Design &design) {
  return smallest_eigenvalue(assemble_sigma(model, design).entries);
}

std::vector<MatrixCovarianceModel> family_members(const RunConfig &config) {
  std::vector<MatrixCovarianceModel> out;
  for (double value : config.family->values)
    out.push_back(build_model_with(config.model, *config.family, value));
  return out;
}

Json base_report(const std::string &command, const RunConfig &config) {
  return Json{{"command", command}, {"config", config_to_json(config)}};
}

RunOutput run_audit(const RunConfig &config) {
  const MatrixCovarianceModel model = build_model(config.model);
  const Design design = build_design(config.design);
  check_model_design(model, design);
  RunOutput out;
  out.report = base_report("audit", config);
  out.report["N"] = design.total();
  out.report["assumptions"] = assumptions(model, design, config);
  out.exit_code = assumptions_pass(out.report["assumptions"]) ? exit_ok : exit_certification;
  return out;
}

RunOutput run_certify(const RunConfig &config, bool dump_matrix) {
  const MatrixCovarianceModel model = build_model(config.model);
  const Design design = build_design(config.design);
  check_model_design(model, design);
  const CertifyOptions options = build_certify_options(config.certify);

  RunOutput out;
  out.report = base_report("certify", config);
  out.report["N"] = design.total();
  out.report["assumptions"] = assumptions(model, design, config);

  std::optional<CertifiedBound> bound;
  std::vector<MatrixCovarianceModel> members;
  try {
    if (config.family) {
      members = family_members(config);
      std::vector<std::vector<double>> grid;
      for (double value : config.family->values)
        grid.push_back({value});
      const auto &family = *config.family;
      const ModelSpec &spec = config.model;
      bound = certify_uniform(
          [&](std::span<const double> theta) { return build_model_with(spec, family, theta[0]); },
          grid, design, options);
    } else {
      bound = certify(model, design, options);
    }
  } catch (const CertificationFailure &failure) {
    out.report["bound"] = nullptr;
    out.report["failure_reason"] = failure.what();
    out.report["failure"] = failure_json(failure);
    out.exit_code = exit_certification;
  }

  const bool small = design.total() <= config.certify.eigen_cap;
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  if (small) {
    if (members.empty()) {
      lambda1 = sigma_lambda1(model, design);
    } else {
      Json per = Json::array();
      lambda1 = std::numeric_limits<double>::infinity();
      for (const auto &member : members) {
        const double value = sigma_lambda1(member, design);
        per.push_back(value);
        lambda1 = std::min(lambda1, value);
      }
      out.report["lambda1_per_theta"] = per;
    }
  }
  out.report["lambda1"] = nullable(lambda1);

  if (bound) {
    out.report["bound"] = bound_to_json(*bound);
    out.report["assumptions"]["spectral"] =
        Json{{"pass", true},
             {"floor", bound->spectral_floor},
             {"argmin", vector_json(bound->spectral_argmin)},
             {"resolution", bound->spectral_grid_resolution},
             {"box_half_width", bound->delta * bound->support_radius},
             {"delta", bound->delta}};
    out.report["margin"] = small ? Json(lambda1 - bound->value) : Json(nullptr);
  } else {
    out.report["margin"] = nullptr;
  }
  if (dump_matrix)
    out.sigma = assemble_sigma(members.empty() ? model : members.front(), design).entries;
  return out;
}

RunOutput run_spectrum(const RunConfig &config, bool dump_matrix) {
  const MatrixCovarianceModel model = build_model(config.model);
  const Design design = build_design(config.design);
  check_model_design(model, design);
  const CovMatrix sigma = assemble_sigma(model, design);
  const Eigen::VectorXd eigs = symmetric_eigenvalues(sigma.entries);
  RunOutput out;
  out.report = base_report("spectrum", config);
  out.report["N"] = design.total();
  out.report["lambda1"] = eigs(0);
  out.report["lambda_max"] = eigs(eigs.size() - 1);
  out.report["eigenvalue_extremes"] = Json{{"min", eigs(0)}, {"max", eigs(eigs.size() - 1)}};
  out.report["condition_number"] =
      eigs(0) > 0 ? Json(eigs(eigs.size() - 1) / eigs(0)) : Json(nullptr);
  out.report["gershgorin_floor"] = gershgorin_floor(sigma.entries);
  if (dump_matrix)
    out.sigma = sigma.entries;
  return out;
}

RunOutput run_sweep(const RunConfig &config) {
  if (config.n_list.empty())
    throw ParseError("sweep needs sizes: pass --n-list or set sweep.n_list");
  const MatrixCovarianceModel model = build_model(config.model);
  const CertifyOptions options = build_certify_options(config.certify);

  struct Case {
    std::size_t n = 0;
    std::size_t total = 0;
    double lambda1 = std::numeric_limits<double>::quiet_NaN();
    std::optional<CertifiedBound> bound;
    std::string failure;
  };
  std::vector<Case> cases(config.n_list.size());
  std::vector<Design> designs;
  for (std::size_t n : config.n_list) {
    if (n == 0)
      throw ParseError("sweep sizes must be positive");
    designs.push_back(build_design(config.design, n));
    check_model_design(model, designs.back());
  }
  parallel_for(cases.size(), [&](std::size_t i) {
    Case &c = cases[i];
    c.n = config.n_list[i];
    c.total = designs[i].total();
    try {
      c.bound = certify(model, designs[i], options);
    } catch (const CertificationFailure &failure) {
      c.failure = failure.what();
    }
    if (c.total <= config.certify.eigen_cap)
      c.lambda1 = sigma_lambda1(model, designs[i]);
  });

  RunOutput out;
  out.report = base_report("sweep", config);
  out.table = CsvTable{{"n", "N", "lambda1", "bound"}, {}};
  Json rows = Json::array();
  for (const Case &c : cases) {
    const double value =
        c.bound ? c.bound->value : std::numeric_limits<double>::quiet_NaN();
    out.table->rows.push_back(
        {std::to_string(c.n), std::to_string(c.total), csv_number(c.lambda1), csv_number(value)});
    Json row{{"n", c.n}, {"N", c.total}, {"lambda1", nullable(c.lambda1)}};
    if (c.bound) {
      row["bound"] = c.bound->value;
      row["margin"] = nullable(c.lambda1 - c.bound->value);
    } else {
      row["bound"] = nullptr;
      row["margin"] = nullptr;
      row["failure_reason"] = c.failure;
      out.exit_code = exit_certification;
    }
    rows.push_back(row);
  }
  out.report["rows"] = rows;
  return out;
}

const std::vector<std::size_t> kCounterexampleSizes{4, 16, 64, 256, 512};

RunOutput run_counterexample(const std::optional<RunConfig> &config,
                             const std::vector<std::size_t> &n_list) {
  std::vector<std::size_t> sizes = kCounterexampleSizes;
  if (!n_list.empty())
    sizes = n_list;
  else if (config && !config->n_list.empty())
    sizes = config->n_list;
  const MatrixCovarianceModel model =
      make_lmc({{Eigen::MatrixXd::Ones(1, 1),
                 make_isotropic(CovKind::triangular, 1.0, 1.0)}},
               1);

  RunOutput out;
  out.report = Json{{"command", "counterexample"},
                    {"config", config ? config_to_json(*config) : Json(nullptr)},
                    {"model", model.describe()},
                    {"grid_spacing", 0.5}};
  out.table = CsvTable{{"n", "closed_form_lambda1", "numeric_lambda1", "abs_difference"}, {}};
  Json rows = Json::array();
  const double pi = std::acos(-1.0);
  for (std::size_t n : sizes) {
    if (n == 0)
      throw ParseError("counterexample sizes must be positive");
    const std::size_t counts[] = {n};
    const Design design = make_grid_design(1, counts, 0.5);
    const double closed = 1.0 + std::cos(static_cast<double>(n) * pi / (n + 1.0));
    const double numeric = smallest_eigenvalue(assemble_sigma(model, design).entries);
    const double diff = std::abs(numeric - closed);
    if (diff > 1e-10)
      out.exit_code = exit_certification;
    out.table->rows.push_back(
        {std::to_string(n), csv_number(closed), csv_number(numeric), csv_number(diff)});
    rows.push_back(Json{{"n", n},
                        {"closed_form_lambda1", closed},
                        {"numeric_lambda1", numeric},
                        {"abs_difference", diff}});
  }
  out.report["rows"] = rows;
  return out;
}

RunOutput run_taper(const RunConfig &config, bool dump_matrix) {
  const MatrixCovarianceModel model = build_model(config.model);
  const Design design = build_design(config.design);
  check_model_design(model, design);
  const Eigen::MatrixXd sigma = assemble_sigma(model, design).entries;
  const auto n = sigma.rows();
  Eigen::MatrixXd taper_entries;
  if (config.taper.kind == "wendland")
    taper_entries = wendland_taper(design, config.taper.range).entries();
  else if (config.taper.kind == "identity")
    taper_entries = Eigen::MatrixXd::Identity(n, n);
  else
    taper_entries = Eigen::MatrixXd::Ones(n, n);
  const TaperMatrix taper(taper_entries);

  RunOutput out;
  out.report = base_report("taper", config);
  out.report["N"] = design.total();
  const double lambda1 = smallest_eigenvalue(sigma);
  const Eigen::MatrixXd tapered = schur_product(sigma, taper.entries());
  const double tapered_lambda1 = smallest_eigenvalue(tapered);
  out.report["sigma_lambda1"] = lambda1;
  out.report["taper_diag_min"] = taper.diag_min();
  out.report["tapered_lambda1"] = tapered_lambda1;
  try {
    const double bound = taper_floor(lambda1, taper);
    out.report["bound"] = bound;
    out.report["slack"] = tapered_lambda1 - bound;
    if (tapered_lambda1 - bound < -1e-10) {
      out.report["failure_reason"] = "tapered lambda_1 falls below the bound";
      out.exit_code = exit_certification;
    }
  } catch (const ContractError &error) {
    out.report["bound"] = nullptr;
    out.report["slack"] = nullptr;
    out.report["failure_reason"] = error.what();
    out.exit_code = exit_certification;
  }
  if (dump_matrix)
    out.sigma = tapered;
  return out;
}

} // namespace

RunOutput run(const std::string &command, const std::optional<RunConfig> &config,
              bool dump_matrix, const std::vector<std::size_t> &n_list) {
  if (command == "counterexample")
    return run_counterexample(config, n_list);
  if (std::find(command_names().begin(), command_names().end(), command) ==
      command_names().end())
    throw ParseError("unknown command '" + command + "'");
  if (!config)
    throw ParseError("command '" + command + "' needs --config");
  if (command == "audit")
    return run_audit(*config);
  if (command == "certify")
    return run_certify(*config, dump_matrix);
  if (command == "spectrum")
    return run_spectrum(*config, dump_matrix);
  if (command == "sweep") {
    RunConfig sized = *config;
    if (!n_list.empty())
      sized.n_list = n_list;
    return run_sweep(sized);
  }
  return run_taper(*config, dump_matrix);
}

std::vector<std::string> write_artifacts(const std::string &command, const RunOutput &output,
                                         const std::string &dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  const std::string report = (fs::path(dir) / "report.json").string();
  emit_report(output.report, "json", report);
  written.push_back(report);
  if (output.table) {
    const std::string table = (fs::path(dir) / (command + ".csv")).string();
    emit_report(*output.table, "csv", table);
    written.push_back(table);
  }
  if (output.sigma) {
    const std::string sigma = (fs::path(dir) / "sigma.csv").string();
    std::ostringstream text;
    write_matrix_csv(text, *output.sigma);
    write_text_file(sigma, text.str());
    written.push_back(sigma);
  }
  return written;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Certified lower bounds on the smallest eigenvalue of multivariate "
               "covariance matrices"};
  app.name("specfloor");
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::vector<std::size_t> n_list;
  bool dump_matrix = false;
  app.add_option("command", command, "audit | certify | spectrum | sweep | counterexample | taper")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "YAML configuration file");
  app.add_option("--out", out_dir, "directory for report.json and CSV artifacts");
  app.add_option("--n-list", n_list, "comma-separated sizes for sweep / counterexample")
      ->delimiter(',');
  app.add_flag("--dump-matrix", dump_matrix, "also write the covariance matrix as sigma.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError &error) {
    err << "specfloor: " << error.what() << "\n" << app.help();
    return exit_usage;
  }

  try {
    std::optional<RunConfig> config;
    if (!config_path.empty()) {
      config = parse_config(config_path);
      if (!n_list.empty())
        config->n_list = n_list;
      if (!out_dir.empty())
        config->output_dir = out_dir;
    }
    const RunOutput output = run(command, config, dump_matrix, n_list);
    const std::string dir = !out_dir.empty() ? out_dir : config ? config->output_dir : "";
    if (!dir.empty())
      write_artifacts(command, output, dir);
    else if (output.sigma)
      write_artifacts(command, output, ".");
    out << (output.table ? to_csv_text(*output.table) : to_json_text(output.report));
    if (output.exit_code == exit_certification) {
      if (output.report.contains("failure_reason"))
        err << "specfloor: certification failed: "
            << output.report["failure_reason"].get<std::string>() << "\n";
      else
        err << "specfloor: at least one check failed; see the report\n";
    }
    return output.exit_code;
  } catch (const std::exception &error) {
    err << "specfloor: " << error.what() << "\n";
    return exit_usage;
  }
}

} // namespace specfloor::cli
