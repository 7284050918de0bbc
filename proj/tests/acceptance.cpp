// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bae/cli.hpp"
#include "bae/fock.hpp"
#include "bae/jump_stats.hpp"
#include "bae/measurement.hpp"
#include "bae/setup_model.hpp"

using namespace bae;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void run(int id, const std::string& title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.check(secs < limit_s, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", limit_s) + " s");
  if (!v.pass) ++failures;
  std::printf("criterion %d [%s] %s: %s\n", id, v.pass ? "PASS" : "FAIL", title.c_str(),
              v.detail.c_str());
  std::fflush(stdout);
}

RunConfig config(std::vector<std::string> args) { return parse_args(args); }

// Non-increasing sequence; steps smaller than `floor` count as ties.
bool non_increasing(const std::vector<double>& v, double floor) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + floor) return false;
  }
  return true;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

// Root mean square deviation of batch means of `value(record)` from `truth`.
double batch_rms(const std::vector<OutcomeRecord>& recs, std::size_t batch, double truth,
                 const std::function<double(const OutcomeRecord&)>& value) {
  const std::size_t batches = recs.size() / batch;
  double sq = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) s += value(recs[i]);
    const double d = s / static_cast<double>(batch) - truth;
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(batches));
}

Verdict povm_completeness() {
  Verdict v;
  double worst = 0.0;
  int cases = 0;
  for (double dx : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    for (int dim : {16, 24, 32}) {
      const MeasurementModel model(dx, dim);
      const QuadratureGrid grid = make_grid(GridKind::Uniform, completeness_span(model), 2001);
      worst = std::max(worst, completeness_defect(model, grid));
      ++cases;
    }
  }
  v.check(worst < 1e-8, "max trusted-subspace defect " + fmt("%.2e", worst) + " < 1e-8 over " +
                            std::to_string(cases) + " (dx, dim) cases");
  return v;
}

Verdict distribution_shape() {
  Verdict v;
  const json t = cmd_distribution(config({"distribution", "--delta-x", "10"}));
  const auto& cols = t["columns"];
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin());
  };
  const std::size_t ix = col("x_m_over_dx"), ip = col("dx3_P_1"), ia = col("dx3_asymptotic_p1");
  const auto& rows = t["rows"];
  const double step = rows[1][ix].get<double>() - rows[0][ix].get<double>();
  std::size_t pos = 0, neg = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double x = rows[r][ix].get<double>();
    const double p = rows[r][ip].get<double>();
    if (x > 0 && p > rows[pos][ip].get<double>()) pos = r;
    if (x < 0 && p > rows[neg][ip].get<double>()) neg = r;
  }
  const double root2 = std::sqrt(2.0);
  const double xp = rows[pos][ix].get<double>();
  const double xn = rows[neg][ix].get<double>();
  v.check(std::abs(xp - root2) <= step && std::abs(xn + root2) <= step,
          "maxima at x_m/dx = " + fmt("%+.4f", xn) + ", " + fmt("%+.4f", xp) +
              " (target +/-1.4142, step " + fmt("%.4f", step) + ")");

  const double target = std::exp(-1.0) / (8.0 * std::sqrt(2.0 * std::numbers::pi));
  const double height = std::max(rows[pos][ip].get<double>(), rows[neg][ip].get<double>());
  v.check(std::abs(height / target - 1.0) < 0.02,
          "peak dx^3 P_1 = " + fmt("%.6f", height) + " vs " + fmt("%.6f", target) + " (" +
              fmt("%+.2f", 100.0 * (height / target - 1.0)) + "%, < 2%)");
  v.check(height < 0.02, "peak below 0.02");

  double worst = 0.0;
  for (std::size_t r : {pos, neg}) {
    worst = std::max(worst, std::abs(rows[r][ip].get<double>() / rows[r][ia].get<double>() - 1.0));
  }
  v.check(worst < 0.01, "exact vs large-resolution form at the peaks " +
                            fmt("%.3f", 100.0 * worst) + "% (< 1%)");
  return v;
}

Verdict jump_probability_check() {
  Verdict v;
  const json t = cmd_jump_sweep(config({"jump-sweep", "--delta-x", "2,4,5,10,20"}));
  std::vector<double> dxs, ratios;
  for (const auto& row : t["rows"]) {
    dxs.push_back(row[0].get<double>());
    ratios.push_back(row[3].get<double>());
  }
  const double r4 = ratios[1], r10 = ratios[3];
  v.check(std::abs(r4 - 1.0) < 0.02, "dx=4 ratio " + fmt("%.5f", r4) + " (within 2%)");
  v.check(std::abs(r10 - 1.0) < 0.005, "dx=10 ratio " + fmt("%.5f", r10) + " (within 0.5%)");
  const std::vector<double> sweep = {ratios[0], ratios[2], ratios[3], ratios[4]};
  std::vector<double> gaps;
  for (double r : sweep) gaps.push_back(std::abs(1.0 - r));
  v.check(strictly_decreasing(gaps) && std::all_of(sweep.begin(), sweep.end(),
                                                   [](double r) { return r < 1.0; }),
          "ratio monotone over dx {2,5,10,20}: " + fmt("%.5f", sweep[0]) + ", " +
              fmt("%.5f", sweep[1]) + ", " + fmt("%.5f", sweep[2]) + ", " + fmt("%.5f", sweep[3]));
  return v;
}

Verdict correlation_constants() {
  Verdict v;
  double worst_op = 0.0, worst_adjacent = 0.0;
  for (int dim : {4, 5, 6, 8, 16, 32, 48}) {
    const OperatorCorrelationTerms t = operator_correlation_terms(FockState::vacuum(dim));
    worst_op = std::max(worst_op, std::abs(t.value - 0.125));
    worst_adjacent = std::max({worst_adjacent, std::abs(t.x2n), std::abs(t.nx2)});
  }
  v.check(worst_op < 1e-12, "operator correlation |C - 1/8| max " + fmt("%.1e", worst_op) +
                                " over dims 4..48");
  v.check(worst_adjacent <= 1e-15, "n-adjacent terms max |.| " + fmt("%.1e", worst_adjacent));

  std::string values;
  bool within = true;
  for (const char* dx : {"5", "10", "20"}) {
    const json p = cmd_correlation(config({"correlation", "--delta-x", dx}));
    const double c = p["exact_c_integral"]["value"].get<double>();
    within &= std::abs(c / 0.125 - 1.0) < 0.01;
    values += std::string(values.empty() ? "" : ", ") + "dx=" + dx + ": " + fmt("%.6f", c);
  }
  v.check(within, "outcome-weighted integral within 1% of 1/8 (" + values + ")");
  return v;
}

Verdict monte_carlo() {
  Verdict v;
  const double dx = 5.0;
  const int dim = 32;
  const MeasurementModel model(dx, dim);
  const FockState vac = FockState::vacuum(dim);
  const QuadratureGrid grid =
      make_grid(GridKind::Uniform, 6.0 * std::sqrt(dx * dx + 1.0), 2001);
  ExactInputs exact;
  exact.jump_probability = jump_probability(vac, model, grid);
  exact.c_integral = measured_correlation(vac, model, grid);

  std::vector<double> se_jump, se_c;
  std::vector<OutcomeRecord> big;
  for (std::int64_t shots : {10000, 100000, 1000000}) {
    auto recs = run_experiment(vac, model, shots, 20240611 + static_cast<std::uint64_t>(shots));
    const CorrelationReport r = summarize(recs, dx, exact);
    se_jump.push_back(r.jump_fraction->standard_error);
    se_c.push_back(r.measured_c->standard_error);
    if (shots == 1000000) {
      const double zj = (r.jump_fraction->value - *exact.jump_probability) /
                        r.jump_fraction->standard_error;
      const double zc = (r.measured_c->value - *exact.c_integral) / r.measured_c->standard_error;
      v.check(std::abs(zj) < 3.0, "1e6 shots: jump fraction " +
                                      fmt("%.6f", r.jump_fraction->value) + " vs exact " +
                                      fmt("%.6f", *exact.jump_probability) + " (" +
                                      fmt("%+.2f", zj) + " SE)");
      v.check(std::abs(zc) < 3.0, "estimator " + fmt("%.5f", r.measured_c->value) +
                                      " vs exact " + fmt("%.5f", *exact.c_integral) + " (" +
                                      fmt("%+.2f", zc) + " SE)");
      big = std::move(recs);
    }
  }

  // Standard errors across the three runs: slope of log SE vs log shots.
  auto slope = [](const std::vector<double>& se) {
    return (std::log(se[2]) - std::log(se[0])) / (std::log(1e6) - std::log(1e4));
  };
  const double sj = slope(se_jump), sc = slope(se_c);
  v.check(std::abs(sj + 0.5) < 0.05 && std::abs(sc + 0.5) < 0.05,
          "standard-error slope vs shots " + fmt("%.3f", sj) + ", " + fmt("%.3f", sc) +
              " (expect -0.5)");

  // Realized errors: batch means of the 1e6 run at 1e4 and 1e5 shots.
  const double c_true = *exact.c_integral;
  auto c_of = [dx](const OutcomeRecord& r) { return r.photon_n * (r.x_m * r.x_m - dx * dx); };
  const double rms4 = batch_rms(big, 10000, c_true, c_of);
  const double rms5 = batch_rms(big, 100000, c_true, c_of);
  const double ratio = rms4 / rms5;
  // 10 batches at 1e5 give the RMS to about +/-25%.
  v.check(ratio > std::sqrt(10.0) / 2.0 && ratio < 2.0 * std::sqrt(10.0),
          "realized RMS error ratio 1e4/1e5 batches " + fmt("%.2f", ratio) + " (expect 3.16)");
  return v;
}

Verdict setup_equivalence() {
  Verdict v;
  for (const char* a : {"1.2", "1.5", "2.0"}) {
    const json p = cmd_setup_check(config({"setup-check", "--gain-a", a, "--dim", "40"}));
    const double gain = std::stod(a);
    const double r_ok = std::abs(p["reflectivity"].get<double>() - gain * gain / (gain * gain + 1));
    const double dx_ok =
        std::abs(p["delta_x"].get<double>() - gain / (2.0 * (gain * gain - 1.0)));
    double worst = 0.0;
    for (const auto& in : p["inputs"]) worst = std::max(worst, in["defect"].get<double>());

    std::vector<double> dv, d1;
    for (const auto& row : p["convergence"]["rows"]) {
      dv.push_back(row[2].get<double>());
      d1.push_back(row[3].get<double>());
    }
    const double scale_diff = p["calibration_scale_difference"].get<double>();
    std::ostringstream conv;
    conv.precision(2);
    conv << std::scientific << "[" << dv[0] << ", " << dv[1] << ", " << dv[2] << "] / [" << d1[0]
         << ", " << d1[1] << ", " << d1[2] << "]";
    v.check(r_ok < 1e-15 && dx_ok < 1e-15 && worst < 1e-3,
            std::string("a=") + a + ": defect " + fmt("%.2e", worst) + " < 1e-3");
    v.check(non_increasing(dv, 1e-12) && non_increasing(d1, 1e-12),
            std::string("a=") + a + " defect vs dim {20,30,40} vacuum/|1> " + conv.str());
    v.check(scale_diff < 1e-3, std::string("a=") + a + " calibration scale spread " +
                                   fmt("%.1e", scale_diff));
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / "bae_qnd_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> base = {"simulate", "--delta-x", "5",  "--shots", "200000",
                                         "--seed",   "99",        "--format", "json"};
  auto run_to = [&](const std::string& name, const std::string& threads) {
    auto args = base;
    const auto path = (dir / name).string();
    args.insert(args.end(), {"--out", path, "--threads", threads});
    std::ostringstream out, err;
    if (run_cli(args, out, err) != 0) throw std::runtime_error(err.str());
    std::ifstream f(path);
    return json::parse(f)["payload"].dump();
  };
  const std::string first = run_to("serial_a.json", "1");
  const std::string second = run_to("serial_b.json", "1");
  const std::string parallel = run_to("parallel.json", "4");
  v.check(first == second, "repeated runs byte-identical payloads (" +
                               std::to_string(first.size()) + " bytes)");
  v.check(first == parallel, "serial and 4-thread payloads identical");
  return v;
}

}  // namespace

int main() {
  run(1, "POVM completeness", 10.0, povm_completeness);
  run(2, "one-photon outcome distribution", 5.0, distribution_shape);
  run(3, "jump probability", 10.0, jump_probability_check);
  run(4, "correlation constants", 5.0, correlation_constants);
  run(5, "Monte Carlo consistency", 60.0, monte_carlo);
  run(6, "setup equivalence", 120.0, setup_equivalence);
  run(7, "determinism", 30.0, determinism);
  std::printf("acceptance: %d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
