#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "bae/cli.hpp"

using namespace bae;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "bae_qnd_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int column(const json& table, const std::string& name) {
  const auto& cols = table["columns"];
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TEST(ParseArgs, Defaults) {
  const RunConfig c = parse_args({"distribution", "--delta-x", "2"});
  EXPECT_EQ(c.command, "distribution");
  EXPECT_EQ(c.dim, 32);
  EXPECT_EQ(c.grid_count, 2001);
  EXPECT_EQ(c.n_max, 4);
  EXPECT_FALSE(c.grid_span);
  EXPECT_FALSE(c.seed);
  const json r = resolved_config(c);
  EXPECT_NEAR(r["grid_span"].get<double>(), 6.0 * std::sqrt(5.0), 1e-14);
  EXPECT_EQ(r["grid_kind"], "uniform");
}

TEST(ParseArgs, ConfigErrors) {
  auto kind_of = [](std::vector<std::string> args) {
    try {
      parse_args(args);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidParameter;
  };
  EXPECT_EQ(kind_of({"distribution", "--delta-x", "1", "--gain-a", "2"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"distribution"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"setup-check", "--delta-x", "1"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"simulate", "--delta-x", "1", "--shots", "10"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"correlation", "--delta-x", "1", "--shots", "10"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"distribution", "--delta-x", "1,2"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"distribution", "--delta-x", "1", "--format", "xml"}),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"distribution", "--delta-x", "1", "--n-max", "40"}), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of({"frobnicate"}), ErrorKind::InvalidConfig);
}

TEST(ExitCodes, Documented) {
  EXPECT_EQ(cli({"distribution", "--delta-x", "1", "--gain-a", "2"}).code, kExitConfig);
  const CliRun narrow = cli({"povm-check", "--delta-x", "1", "--dim", "16", "--grid-span", "1"});
  EXPECT_EQ(narrow.code, kExitNumeric);
  EXPECT_NE(narrow.err.find("grid-too-narrow"), std::string::npos);
  EXPECT_NE(narrow.err.find("wider"), std::string::npos);
  const CliRun overflow = cli({"setup-check", "--gain-a", "3", "--dim", "40"});
  EXPECT_EQ(overflow.code, kExitOverflow);
  EXPECT_NE(overflow.err.find("larger dimension"), std::string::npos);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"povm-check", "--delta-x", "1", "--dim", "16"}).code, kExitOk);
}

TEST(Distribution, ScaledColumnsAndPeak) {
  RunConfig c = parse_args({"distribution", "--delta-x", "10"});
  const json t = cmd_distribution(c);
  const int ix = column(t, "x_m_over_dx");
  const int ip = column(t, "dx3_P_1");
  ASSERT_GE(ix, 0);
  ASSERT_GE(ip, 0);
  ASSERT_GE(column(t, "P_4"), 0);
  ASSERT_GE(column(t, "asymptotic_p1"), 0);
  double best = 0.0, best_x = 0.0, best_neg = 0.0, best_neg_x = 0.0;
  for (const auto& row : t["rows"]) {
    const double x = row[ix].get<double>();
    const double p = row[ip].get<double>();
    if (x > 0 && p > best) best = p, best_x = x;
    if (x < 0 && p > best_neg) best_neg = p, best_neg_x = x;
  }
  const double step = t["rows"][1][ix].get<double>() - t["rows"][0][ix].get<double>();
  EXPECT_NEAR(best_x, std::sqrt(2.0), step);
  EXPECT_NEAR(best_neg_x, -std::sqrt(2.0), step);
  EXPECT_NEAR(best, 0.0184, 0.0002);
}

TEST(Distribution, PhotonColumnsBoundedByDensity) {
  RunConfig c = parse_args({"distribution", "--delta-x", "1", "--dim", "12", "--n-max", "11",
                            "--grid-count", "81"});
  const json t = cmd_distribution(c);
  const int ip = column(t, "P");
  for (const auto& row : t["rows"]) {
    double sum = 0.0;
    for (int n = 0; n <= 11; ++n) sum += row[column(t, "P_" + std::to_string(n))].get<double>();
    EXPECT_NEAR(sum, row[ip].get<double>(), 1e-8);
  }
}

TEST(JumpSweep, AsymptoteAndRatios) {
  RunConfig c = parse_args({"jump-sweep", "--delta-x", "2,4,5,10,20"});
  const json t = cmd_jump_sweep(c);
  ASSERT_EQ(t["rows"].size(), 5u);
  EXPECT_EQ(t["rows"][1][2].get<double>(), 0.00390625);
  double prev = 0.0;
  for (const auto& row : t["rows"]) {
    const double ratio = row[3].get<double>();
    EXPECT_GT(ratio, prev);
    EXPECT_LT(ratio, 1.0);
    prev = ratio;
  }
  EXPECT_GT(prev, 0.999);
}

TEST(Correlation, ExactOnlyWithoutShots) {
  const json p = cmd_correlation(parse_args({"correlation", "--delta-x", "10", "--dim", "6"}));
  EXPECT_NEAR(p["operator_c"]["value"].get<double>(), 0.125, 1e-12);
  EXPECT_EQ(p["operator_c"]["standard_error"].get<double>(), 0.0);
  EXPECT_NEAR(p["exact_c_integral"]["value"].get<double>(), 0.125, 0.00125);
  EXPECT_FALSE(p.contains("measured_c"));
  EXPECT_FALSE(p.contains("jump_fraction"));
  EXPECT_FALSE(p.contains("shots"));

  const json s = cmd_correlation(parse_args(
      {"correlation", "--delta-x", "2", "--dim", "16", "--shots", "20000", "--seed", "4"}));
  EXPECT_TRUE(s.contains("measured_c"));
  EXPECT_GT(s["measured_c"]["standard_error"].get<double>(), 0.0);
}

TEST(PovmCheck, ReportsDefectsForThreeDims) {
  const json p = cmd_povm_check(parse_args({"povm-check", "--delta-x", "1", "--dim", "16"}));
  EXPECT_LT(p["completeness_defect"].get<double>(), 1e-8);
  EXPECT_EQ(p["trusted_size"], 12);
  EXPECT_EQ(p["dims"]["rows"].size(), 3u);
  for (const auto& row : p["dims"]["rows"]) {
    EXPECT_LT(row[3].get<double>(), 1e-8);
    // The truncated product is worst at the edge.
    EXPECT_GT(row[7].get<double>(), row[6].get<double>());
  }
}

TEST(SetupCheck, DerivedQuantities) {
  const json p = cmd_setup_check(
      parse_args({"setup-check", "--gain-a", "1.4142135623730951", "--dim", "20"}));
  EXPECT_NEAR(p["reflectivity"].get<double>(), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p["delta_x"].get<double>(), 0.70711, 1e-5);
  EXPECT_EQ(p["inputs"].size(), 2u);
  EXPECT_EQ(p["convergence"]["rows"].size(), 3u);
}

TEST(Output, CsvAndJsonCarryIdenticalValues) {
  const auto csv_path = temp_path("dist.csv");
  const auto json_path = temp_path("dist.json");
  const std::vector<std::string> base = {"distribution", "--delta-x", "3", "--grid-count", "41"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  ASSERT_EQ(cli(with({"--out", csv_path.string(), "--format", "csv"})).code, 0);
  ASSERT_EQ(cli(with({"--out", json_path.string(), "--format", "json"})).code, 0);

  const std::string csv = slurp(csv_path);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const auto rows = parse_csv(csv);
  const json env = json::parse(slurp(json_path));
  const json& t = env["payload"];
  ASSERT_EQ(rows.size(), t["rows"].size() + 1);
  for (std::size_t i = 0; i < rows[0].size(); ++i) EXPECT_EQ(rows[0][i], t["columns"][i]);
  for (std::size_t r = 0; r < t["rows"].size(); ++r) {
    for (std::size_t i = 0; i < rows[r + 1].size(); ++i) {
      EXPECT_EQ(std::stod(rows[r + 1][i]), t["rows"][r][i].get<double>());
    }
  }
  const json sidecar = json::parse(slurp(csv_path.string() + ".meta.json"));
  EXPECT_EQ(sidecar["checksum"], env["checksum"]);
}

TEST(Output, ReportCsvFlattensPayload) {
  const json p = cmd_correlation(parse_args({"correlation", "--delta-x", "5", "--dim", "8"}));
  const auto rows = parse_csv(payload_csv(p));
  ASSERT_EQ(rows[0], (std::vector<std::string>{"quantity", "value"}));
  bool found = false;
  for (const auto& r : rows) {
    if (r[0] == "operator_c.value") {
      EXPECT_EQ(std::stod(r[1]), p["operator_c"]["value"].get<double>());
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Envelope, MetadataReproducesPayload) {
  const RunConfig c =
      parse_args({"simulate", "--delta-x", "2", "--dim", "12", "--shots", "3000", "--seed", "11",
                  "--format", "json"});
  const json payload = run_command(c);
  const json env = make_envelope(c, payload);
  EXPECT_EQ(env["meta"]["seed"], 11);
  EXPECT_EQ(env["meta"]["tool"], kToolName);
  EXPECT_TRUE(env["meta"].contains("timestamp"));
  EXPECT_EQ(env["checksum"], payload_checksum(payload));

  const RunConfig again = config_from_metadata(env["meta"]["config"]);
  const json rerun = run_command(again);
  EXPECT_EQ(rerun.dump(), payload.dump());
}

TEST(Simulate, SameSeedSamePayload) {
  const auto a = temp_path("sim_a.json");
  const auto b = temp_path("sim_b.json");
  const std::vector<std::string> args = {"simulate", "--delta-x", "2", "--dim", "12", "--shots",
                                         "9000", "--seed", "5", "--format", "json"};
  auto with_out = [&](const std::filesystem::path& p, const std::string& threads) {
    auto v = args;
    v.insert(v.end(), {"--out", p.string(), "--threads", threads});
    return v;
  };
  ASSERT_EQ(cli(with_out(a, "1")).code, 0);
  ASSERT_EQ(cli(with_out(b, "3")).code, 0);
  const json ja = json::parse(slurp(a));
  const json jb = json::parse(slurp(b));
  EXPECT_EQ(ja["payload"].dump(), jb["payload"].dump());
  EXPECT_EQ(ja["checksum"], jb["checksum"]);
}

TEST(Simulate, RecordStrideDownsamples) {
  const json p = cmd_simulate(parse_args({"simulate", "--delta-x", "1", "--dim", "8", "--shots",
                                          "1000", "--seed", "1", "--record-stride", "100"}));
  EXPECT_EQ(p["records"]["rows"].size(), 10u);
  EXPECT_EQ(p["report"]["shots"], 1000);
  EXPECT_EQ(p["records"]["rows"][3][0], 300);
}
