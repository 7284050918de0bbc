#pragma once

// Command-line front end of bae-qnd-sim. Each command produces a JSON payload;
// the writer wraps it in an envelope {meta, payload, checksum} or renders it
// as CSV.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bae/error.hpp"

namespace bae {

inline constexpr const char* kToolName = "bae-qnd-sim";
inline constexpr const char* kToolVersion = "1.0.0";

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string command;
  /// One value for most commands; jump-sweep accepts a list.
  std::vector<double> delta_x;
  std::optional<double> gain_a;
  int dim = 32;
  /// Setup circuit lines; 0 selects 2 * dim.
  int dim_meter = 0;
  /// Unset: command default (6 sqrt(dx^2 + 1), or the completeness span for
  /// povm-check).
  std::optional<double> grid_span;
  int grid_count = 2001;
  std::string grid_kind = "uniform";
  std::optional<std::int64_t> shots;
  std::optional<std::uint64_t> seed;
  int n_max = 4;
  /// Fock input state |input_n>.
  int input_n = 0;
  /// simulate: keep every k-th record in the output.
  std::int64_t record_stride = 1;
  bool swap_arms = false;
  std::string out = "-";
  OutputFormat format = OutputFormat::Csv;
  /// Worker threads for sampling; 0 = BAE_QND_THREADS or hardware default.
  /// Not part of the output, which does not depend on it.
  int threads = 0;
};

/// Documented process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitOverflow = 4,
};

int exit_code_for(ErrorKind kind);

/// Parses arguments (without the program name). Throws invalid-config on any
/// parse or consistency error, including a help request.
RunConfig parse_args(const std::vector<std::string>& args);

/// Checks option combinations for the command. Throws invalid-config.
void validate(const RunConfig& config);

/// The config with every default made explicit, as recorded in metadata.
nlohmann::json resolved_config(const RunConfig& config);

/// Inverse of resolved_config: rebuilds the config recorded in an envelope.
RunConfig config_from_metadata(const nlohmann::json& config);

nlohmann::json cmd_distribution(const RunConfig& config);
nlohmann::json cmd_jump_sweep(const RunConfig& config);
nlohmann::json cmd_correlation(const RunConfig& config);
nlohmann::json cmd_povm_check(const RunConfig& config);
nlohmann::json cmd_setup_check(const RunConfig& config);
nlohmann::json cmd_simulate(const RunConfig& config);

/// Dispatches on config.command after validation.
nlohmann::json run_command(const RunConfig& config);

/// FNV-1a 64 of the compact payload dump, as "fnv1a64:<hex>".
std::string payload_checksum(const nlohmann::json& payload);

nlohmann::json make_envelope(const RunConfig& config, const nlohmann::json& payload);

/// CSV of a {columns, rows} table; other objects are flattened into
/// quantity,value rows with dotted keys.
std::string payload_csv(const nlohmann::json& payload);

/// Full process behaviour: parse, run, write, report errors. Returns the exit
/// code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bae
