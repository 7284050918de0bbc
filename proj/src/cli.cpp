#include "bae/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bae/fock.hpp"
#include "bae/jump_stats.hpp"
#include "bae/measurement.hpp"
#include "bae/quadrature.hpp"
#include "bae/setup_model.hpp"

namespace bae {
namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"distribution", "jump-sweep", "correlation",
                                            "povm-check",   "setup-check", "simulate"};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::InvalidConfig, what); }

double single_delta_x(const RunConfig& c) { return c.delta_x.front(); }

double default_span(double dx) { return 6.0 * std::sqrt(dx * dx + 1.0); }

QuadratureGrid outcome_grid(const RunConfig& c, double dx) {
  return make_grid(grid_kind_from_string(c.grid_kind), c.grid_span.value_or(default_span(dx)),
                   c.grid_count);
}

json table(std::vector<std::string> columns) {
  return json{{"columns", std::move(columns)}, {"rows", json::array()}};
}

bool is_table(const json& j) {
  return j.is_object() && j.size() == 2 && j.contains("columns") && j.contains("rows");
}

std::string format_cell(const json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_number_integer() || v.is_number_unsigned() || v.is_boolean()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "." + std::to_string(i), out);
    }
  } else {
    out.emplace_back(prefix, j);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
      return kExitConfig;
    case ErrorKind::TruncationOverflow:
      return kExitOverflow;
    default:
      return kExitNumeric;
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct RawOptions {
  RunConfig config;
  double gain_a = 0.0;
  double grid_span = 0.0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  std::string format = "csv";
};

void add_options(CLI::App* app, RawOptions& raw, std::vector<CLI::Option*>& tracked) {
  RunConfig& c = raw.config;
  app->add_option("--delta-x", c.delta_x, "Measurement resolution (comma list for jump-sweep)")
      ->delimiter(',');
  tracked.push_back(app->add_option("--gain-a", raw.gain_a, "OPA gain a > 1 (setup-check)"));
  app->add_option("--dim", c.dim, "Fock truncation of the signal mode")->capture_default_str();
  app->add_option("--dim-meter", c.dim_meter, "Setup circuit truncation (default 2*dim)");
  tracked.push_back(app->add_option("--grid-span", raw.grid_span, "Outcome grid half-width"));
  app->add_option("--grid-count", c.grid_count, "Outcome grid nodes")->capture_default_str();
  app->add_option("--grid-kind", c.grid_kind, "uniform | gauss-hermite")
      ->check(CLI::IsMember({"uniform", "gauss-hermite"}))
      ->capture_default_str();
  tracked.push_back(app->add_option("--shots", raw.shots, "Monte Carlo shots"));
  tracked.push_back(app->add_option("--seed", raw.seed, "Random seed (required for sampling)"));
  app->add_option("--n-max", c.n_max, "Highest photon number tabulated")->capture_default_str();
  app->add_option("--input-n", c.input_n, "Fock input state |n>")->capture_default_str();
  app->add_option("--record-stride", c.record_stride, "simulate: keep every k-th record")
      ->capture_default_str();
  app->add_flag("--swap-arms", c.swap_arms, "setup-check: exchange the OPAs (diagnostic)");
  app->add_option("--threads", c.threads, "Worker threads (0 = BAE_QND_THREADS or all cores)");
  app->add_option("--out", c.out, "Output path, '-' for standard output")->capture_default_str();
  app->add_option("--format", raw.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

// Builds the parser; `raw` receives values. Returns options whose presence
// matters (gain-a, grid-span, shots, seed) per subcommand.
struct Parser {
  CLI::App app{"Backaction-evading quadrature measurement simulator", kToolName};
  RawOptions raw;
  std::vector<std::pair<CLI::App*, std::vector<CLI::Option*>>> subs;

  Parser() {
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    for (const auto& name : kCommands) {
      CLI::App* sub = app.add_subcommand(name);
      std::vector<CLI::Option*> tracked;
      add_options(sub, raw, tracked);
      subs.emplace_back(sub, std::move(tracked));
    }
  }

  RunConfig finish() {
    RunConfig c = raw.config;
    for (const auto& [sub, tracked] : subs) {
      if (!sub->parsed()) continue;
      c.command = sub->get_name();
      if (tracked[0]->count()) c.gain_a = raw.gain_a;
      if (tracked[1]->count()) c.grid_span = raw.grid_span;
      if (tracked[2]->count()) c.shots = raw.shots;
      if (tracked[3]->count()) c.seed = raw.seed;
    }
    c.format = raw.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    return c;
  }

  void parse(const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
};

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  Parser parser;
  try {
    parser.parse(args);
  } catch (const CLI::ParseError& e) {
    config_error(std::string("argument error: ") + e.what());
  }
  RunConfig c = parser.finish();
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    config_error("unknown command '" + c.command + "'");
  }
  const bool has_dx = !c.delta_x.empty();
  if (has_dx && c.gain_a) config_error("give either --delta-x or --gain-a, not both");
  if (c.command == "setup-check") {
    if (!c.gain_a) config_error("setup-check requires --gain-a");
    if (!(*c.gain_a > 1.0) || !std::isfinite(*c.gain_a)) {
      config_error("--gain-a must be a finite value > 1");
    }
    if (c.dim_meter != 0 && c.dim_meter < c.dim) config_error("--dim-meter must be >= --dim");
  } else {
    if (!has_dx) config_error(c.command + " requires --delta-x");
    if (c.command != "jump-sweep" && c.delta_x.size() != 1) {
      config_error(c.command + " takes a single --delta-x value");
    }
    for (double dx : c.delta_x) {
      if (!(dx > 0.0) || !std::isfinite(dx)) config_error("--delta-x values must be positive");
    }
  }
  if (c.dim < 2) config_error("--dim must be >= 2");
  if (c.grid_count < 2) config_error("--grid-count must be >= 2");
  if (c.grid_kind == "gauss-hermite" && c.grid_count > kMaxGaussHermiteCount) {
    config_error("--grid-count above " + std::to_string(kMaxGaussHermiteCount) +
                 " is not supported for gauss-hermite grids");
  }
  if (c.grid_kind != "uniform" && c.grid_kind != "gauss-hermite") {
    config_error("--grid-kind must be uniform or gauss-hermite");
  }
  if (c.grid_span && !(*c.grid_span > 0.0 && std::isfinite(*c.grid_span))) {
    config_error("--grid-span must be positive");
  }
  if (c.n_max < 0 || c.n_max >= c.dim) config_error("--n-max must lie in [0, dim - 1]");
  if (c.input_n < 0 || c.input_n >= c.dim) config_error("--input-n must lie in [0, dim - 1]");
  if (c.shots && *c.shots < 1) config_error("--shots must be >= 1");
  if (c.record_stride < 1) config_error("--record-stride must be >= 1");
  if (c.threads < 0) config_error("--threads must be >= 0");
  if (c.command == "simulate" && !c.shots) config_error("simulate requires --shots");
  if (c.shots && !c.seed) config_error("sampling requires an explicit --seed");
}

json resolved_config(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (c.command == "jump-sweep") {
    j["delta_x"] = c.delta_x;
  } else if (!c.delta_x.empty()) {
    j["delta_x"] = c.delta_x.front();
  } else {
    j["delta_x"] = nullptr;
  }
  j["gain_a"] = c.gain_a ? json(*c.gain_a) : json();
  j["dim"] = c.dim;
  if (c.command == "setup-check") j["dim_meter"] = c.dim_meter == 0 ? 2 * c.dim : c.dim_meter;
  j["grid_kind"] = c.grid_kind;
  if (c.grid_span) {
    j["grid_span"] = *c.grid_span;
  } else if (c.command == "jump-sweep") {
    j["grid_span"] = "per delta_x: 6*sqrt(delta_x^2 + 1)";
  } else if (c.command == "povm-check") {
    j["grid_span"] = "per dim: 6*sqrt(delta_x^2 + dim)";
  } else if (c.command == "setup-check") {
    const double dx = resolution_for_gain(*c.gain_a);
    j["grid_span"] = default_span(dx);
  } else {
    j["grid_span"] = default_span(c.delta_x.front());
  }
  j["grid_count"] = c.grid_count;
  j["shots"] = c.shots ? json(*c.shots) : json();
  j["seed"] = c.seed ? json(*c.seed) : json();
  j["n_max"] = c.n_max;
  j["input_n"] = c.input_n;
  j["record_stride"] = c.record_stride;
  j["swap_arms"] = c.swap_arms;
  j["format"] = c.format == OutputFormat::Json ? "json" : "csv";
  j["out"] = c.out;
  return j;
}

RunConfig config_from_metadata(const json& j) {
  try {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    const json& dx = j.at("delta_x");
    if (dx.is_array()) {
      c.delta_x = dx.get<std::vector<double>>();
    } else if (dx.is_number()) {
      c.delta_x = {dx.get<double>()};
    }
    if (j.at("gain_a").is_number()) c.gain_a = j["gain_a"].get<double>();
    c.dim = j.at("dim").get<int>();
    if (j.contains("dim_meter")) c.dim_meter = j["dim_meter"].get<int>();
    c.grid_kind = j.at("grid_kind").get<std::string>();
    if (j.at("grid_span").is_number()) c.grid_span = j["grid_span"].get<double>();
    c.grid_count = j.at("grid_count").get<int>();
    if (j.at("shots").is_number()) c.shots = j["shots"].get<std::int64_t>();
    if (j.at("seed").is_number()) c.seed = j["seed"].get<std::uint64_t>();
    c.n_max = j.at("n_max").get<int>();
    c.input_n = j.at("input_n").get<int>();
    c.record_stride = j.at("record_stride").get<std::int64_t>();
    c.swap_arms = j.at("swap_arms").get<bool>();
    c.format = j.at("format").get<std::string>() == "json" ? OutputFormat::Json : OutputFormat::Csv;
    c.out = j.at("out").get<std::string>();
    validate(c);
    return c;
  } catch (const json::exception& e) {
    config_error(std::string("malformed recorded config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands

json cmd_distribution(const RunConfig& c) {
  const double dx = single_delta_x(c);
  const MeasurementModel model(dx, c.dim);
  const FockState state = FockState::basis(c.input_n, c.dim);
  const QuadratureGrid grid = outcome_grid(c, dx);

  std::vector<std::string> cols = {"x_m", "x_m_over_dx", "P"};
  for (int n = 0; n <= c.n_max; ++n) cols.push_back("P_" + std::to_string(n));
  cols.insert(cols.end(), {"asymptotic_p1", "dx3_P_1", "dx3_asymptotic_p1"});
  json t = table(cols);

  const double dx3 = dx * dx * dx;
  for (double x : grid.nodes) {
    const Eigen::VectorXd p = model.apply(x, state).cwiseAbs2();
    json row = json::array({x, x / dx, outcome_density(state, model, x)});
    for (int n = 0; n <= c.n_max; ++n) row.push_back(p(n));
    const double asym = asymptotic_p1(dx, x);
    row.push_back(asym);
    row.push_back(dx3 * p(1));
    row.push_back(dx3 * asym);
    t["rows"].push_back(std::move(row));
  }
  return t;
}

json cmd_jump_sweep(const RunConfig& c) {
  json t = table({"delta_x", "jump_probability", "asymptote", "ratio"});
  const FockState state = FockState::basis(c.input_n, c.dim);
  for (double dx : c.delta_x) {
    const MeasurementModel model(dx, c.dim);
    const double p = jump_probability(state, model, outcome_grid(c, dx), c.input_n);
    const double asym = 1.0 / (16.0 * dx * dx);
    t["rows"].push_back(json::array({dx, p, asym, p / asym}));
  }
  return t;
}

json cmd_correlation(const RunConfig& c) {
  const double dx = single_delta_x(c);
  const MeasurementModel model(dx, c.dim);
  const FockState state = FockState::basis(c.input_n, c.dim);
  const QuadratureGrid grid = outcome_grid(c, dx);

  const OperatorCorrelationTerms terms = operator_correlation_terms(state);
  ExactInputs exact;
  exact.jump_probability = jump_probability(state, model, grid, c.input_n);
  exact.c_integral = measured_correlation(state, model, grid);
  exact.covariance = covariance_correlation(state, model, grid);
  exact.operator_c = terms.value;

  CorrelationReport report;
  if (c.shots) {
    const auto records = run_experiment(state, model, *c.shots, *c.seed, c.threads);
    report = summarize(records, dx, exact, c.input_n);
  } else {
    report = exact_report(dx, exact);
  }
  json payload = report;
  payload["operator_terms"] = {{"x2n", terms.x2n}, {"xnx", terms.xnx}, {"nx2", terms.nx2},
                               {"x2", terms.x2},   {"n", terms.n}};
  return payload;
}

json cmd_povm_check(const RunConfig& c) {
  const double dx = single_delta_x(c);
  const GridKind kind = grid_kind_from_string(c.grid_kind);
  const std::vector<int> dims = {std::max(2, c.dim / 2), c.dim, 2 * c.dim};

  json rows = table({"dim", "trusted_size", "grid_span", "defect_trusted", "defect_full",
                     "defect_edge", "product_defect_trusted", "product_defect_full"});
  json payload;
  for (int d : dims) {
    const MeasurementModel model(dx, d);
    const double span = c.grid_span.value_or(completeness_span(model));
    const QuadratureGrid grid = make_grid(kind, span, c.grid_count);
    const Eigen::MatrixXd direct = completeness_residual(model, grid);
    const Eigen::MatrixXd product =
        completeness_residual(model, grid, CompletenessForm::TruncatedProduct);
    const int trusted = trusted_size(d);
    const double direct_trusted = direct.topLeftCorner(trusted, trusted).cwiseAbs().maxCoeff();
    const double direct_full = direct.cwiseAbs().maxCoeff();
    // Entries touching the excluded top levels.
    const double edge = std::max(direct.bottomRows(d - trusted).cwiseAbs().maxCoeff(),
                                 direct.rightCols(d - trusted).cwiseAbs().maxCoeff());
    rows["rows"].push_back(json::array(
        {d, trusted, span, direct_trusted, direct_full, edge,
         product.topLeftCorner(trusted, trusted).cwiseAbs().maxCoeff(),
         product.cwiseAbs().maxCoeff()}));
    if (d == c.dim) {
      payload["delta_x"] = dx;
      payload["dim"] = d;
      payload["trusted_size"] = trusted;
      payload["required_span"] = completeness_span(model);
      payload["grid"] = {{"kind", c.grid_kind},
                         {"span", span},
                         {"count", c.grid_count},
                         {"max_step", grid.max_step()}};
      payload["completeness_defect"] = direct_trusted;
    }
  }
  payload["dims"] = rows;
  return payload;
}

namespace {

json equivalence_json(const EquivalenceReport& r) {
  return {{"defect", r.defect},
          {"worst_x_m", r.worst_x_m},
          {"outcomes_compared", r.outcomes_compared},
          {"max_top_occupation", r.max_top_occupation},
          {"signal_leakage", r.signal_leakage},
          {"overflow", r.overflow}};
}

json calibration_json(const OutcomeCalibration& cal) {
  return {{"scale", cal.scale}, {"offset", cal.offset}, {"residual", cal.residual}};
}

}  // namespace

json cmd_setup_check(const RunConfig& c) {
  const double a = *c.gain_a;
  const SetupParams params = SetupParams::make(a, c.dim, c.dim_meter, c.swap_arms);
  params.validate();
  const double dx = params.delta_x();
  const QuadratureGrid grid = outcome_grid(c, dx);

  const FockState vac = FockState::vacuum(c.dim);
  const FockState one = FockState::basis(1, c.dim);
  const OutcomeCalibration cal = calibrate_outcome_map(params, vac);
  const OutcomeCalibration cal_one = calibrate_outcome_map(params, one);

  json payload;
  payload["gain_a"] = a;
  payload["reflectivity"] = params.reflectivity();
  payload["delta_x"] = dx;
  payload["dim_signal"] = params.dim_signal;
  payload["dim_meter"] = params.dim_meter;
  payload["analytic_scale"] = 2.0 * dx;
  payload["calibration"] = calibration_json(cal);
  payload["calibration_one_photon"] = calibration_json(cal_one);
  payload["calibration_scale_difference"] = std::abs(std::abs(cal.scale) - std::abs(cal_one.scale));

  json inputs = json::array();
  for (const FockState* input : {&vac, &one}) {
    const EquivalenceReport r = equivalence_report(*input, params, grid, cal);
    if (r.overflow) {
      fail(ErrorKind::TruncationOverflow,
           "setup truncation overflows at dim " + std::to_string(c.dim) +
               " (top-quarter occupation " + std::to_string(r.max_top_occupation) +
               ", signal leakage " + std::to_string(r.signal_leakage) +
               "); rerun with a larger --dim, e.g. " + std::to_string(2 * c.dim));
    }
    json entry = equivalence_json(r);
    entry["input_n"] = input == &vac ? 0 : 1;
    inputs.push_back(std::move(entry));
  }
  payload["inputs"] = inputs;

  json conv = table({"dim_signal", "dim_meter", "defect_vacuum", "defect_one_photon",
                     "overflow_vacuum", "overflow_one_photon"});
  for (int d : {c.dim / 2, (3 * c.dim) / 4, c.dim}) {
    if (d < 2) continue;
    const int meter = c.dim_meter == 0 ? 0 : (c.dim_meter * d) / c.dim;
    const SetupParams p = SetupParams::make(a, d, std::max(meter, 0), c.swap_arms);
    const EquivalenceReport rv = equivalence_report(FockState::vacuum(d), p, grid, cal);
    const EquivalenceReport r1 = equivalence_report(FockState::basis(1, d), p, grid, cal);
    conv["rows"].push_back(json::array(
        {p.dim_signal, p.dim_meter, rv.defect, r1.defect, rv.overflow, r1.overflow}));
  }
  payload["convergence"] = conv;
  return payload;
}

json cmd_simulate(const RunConfig& c) {
  const double dx = single_delta_x(c);
  const MeasurementModel model(dx, c.dim);
  const FockState state = FockState::basis(c.input_n, c.dim);
  const QuadratureGrid grid = outcome_grid(c, dx);

  const auto records = run_experiment(state, model, *c.shots, *c.seed, c.threads);
  ExactInputs exact;
  exact.jump_probability = jump_probability(state, model, grid, c.input_n);
  exact.c_integral = measured_correlation(state, model, grid);
  exact.covariance = covariance_correlation(state, model, grid);
  exact.operator_c = operator_correlation(state);
  const CorrelationReport report = summarize(records, dx, exact, c.input_n);

  json t = table({"shot_index", "rng_stream_id", "x_m", "photon_n"});
  json& rows = t["rows"];
  for (std::size_t i = 0; i < records.size(); i += static_cast<std::size_t>(c.record_stride)) {
    const OutcomeRecord& r = records[i];
    rows.push_back(json::array({r.shot_index, r.rng_stream_id, r.x_m, r.photon_n}));
  }
  return {{"records", std::move(t)}, {"report", report}};
}

json run_command(const RunConfig& c) {
  validate(c);
  if (c.command == "distribution") return cmd_distribution(c);
  if (c.command == "jump-sweep") return cmd_jump_sweep(c);
  if (c.command == "correlation") return cmd_correlation(c);
  if (c.command == "povm-check") return cmd_povm_check(c);
  if (c.command == "setup-check") return cmd_setup_check(c);
  return cmd_simulate(c);
}

// ---------------------------------------------------------------------------
// Output

std::string payload_checksum(const json& payload) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : payload.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
  return buf;
}

json make_envelope(const RunConfig& c, const json& payload) {
  json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["config"] = resolved_config(c);
  meta["seed"] = c.seed ? json(*c.seed) : json();
  meta["timestamp"] = utc_timestamp();
  return {{"meta", std::move(meta)}, {"payload", payload}, {"checksum", payload_checksum(payload)}};
}

std::string payload_csv(const json& payload) {
  std::ostringstream os;
  if (is_table(payload)) {
    const auto& cols = payload["columns"];
    for (std::size_t i = 0; i < cols.size(); ++i) {
      os << (i ? "," : "") << cols[i].get<std::string>();
    }
    os << '\n';
    for (const auto& row : payload["rows"]) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
      os << '\n';
    }
    return os.str();
  }
  std::vector<std::pair<std::string, json>> items;
  flatten(payload, "", items);
  os << "quantity,value\n";
  for (const auto& [key, value] : items) os << key << ',' << format_cell(value) << '\n';
  return os.str();
}

namespace {

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) config_error("cannot open output file '" + path + "'");
  f << text;
  if (!f) config_error("failed writing output file '" + path + "'");
}

void write_outputs(const RunConfig& c, const json& payload, std::ostream& out) {
  const json envelope = make_envelope(c, payload);
  if (c.format == OutputFormat::Json) {
    write_text(c.out, envelope.dump(2) + "\n", out);
    return;
  }
  if (c.command == "simulate") {
    write_text(c.out, payload_csv(payload["records"]), out);
    if (c.out != "-") write_text(c.out + ".report.csv", payload_csv(payload["report"]), out);
  } else {
    write_text(c.out, payload_csv(payload), out);
  }
  if (c.out != "-") {
    const json sidecar = {{"meta", envelope["meta"]}, {"checksum", envelope["checksum"]}};
    write_text(c.out + ".meta.json", sidecar.dump(2) + "\n", out);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parser parser;
  try {
    parser.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = parser.app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    const RunConfig config = parser.finish();
    validate(config);
    write_outputs(config, run_command(config), out);
    return kExitOk;
  } catch (const Error& e) {
    err << kToolName << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << kToolName << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace bae
