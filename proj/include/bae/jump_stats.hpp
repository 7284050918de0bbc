#pragma once

// Monte Carlo sampling of quadrature outcomes and subsequent photon counts,
// plus the deterministic jump probability and jump/outcome correlations they
// estimate.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "bae/fock.hpp"
#include "bae/measurement.hpp"
#include "bae/quadrature.hpp"

namespace bae {

/// Deterministic random stream derived from (seed, stream_id). The mapping
/// from raw 64-bit draws to doubles is done here rather than through
/// std::uniform_real_distribution so sequences agree across standard
/// libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t stream_id() const { return stream_id_; }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

struct OutcomeRecord {
  double x_m = 0.0;
  int photon_n = 0;
  std::int64_t shot_index = 0;
  std::uint64_t rng_stream_id = 0;

  bool operator==(const OutcomeRecord&) const = default;
};

/// Inverse-CDF sampler for the outcome density of a fixed state. The density
/// is tabulated on a grid spanning +/-6 sqrt(dx^2 + <x^2> + 1) and treated as
/// piecewise linear between nodes.
class OutcomeSampler {
 public:
  OutcomeSampler(const FockState& state, const MeasurementModel& model);

  double sample(RandomStream& rng) const;
  /// Inverse of the tabulated CDF at u in [0, 1).
  double quantile(double u) const;

  const QuadratureGrid& grid() const { return grid_; }

 private:
  QuadratureGrid grid_;
  std::vector<double> density_;
  std::vector<double> cdf_;
};

double sample_outcome(const FockState& state, const MeasurementModel& model, RandomStream& rng);

/// Ideal projective photon count on a (normalized) state.
int sample_photon_number(const FockState& state_out, RandomStream& rng);

/// Shots per random stream. Shot i uses stream i / kShotsPerStream, so the
/// record sequence does not depend on how many worker threads run.
inline constexpr std::int64_t kShotsPerStream = 4096;

/// Worker count from BAE_QND_THREADS, else the hardware concurrency.
int default_thread_count();

/// Independent shots: sample x_m, condition, count photons. `threads` <= 0
/// selects default_thread_count().
std::vector<OutcomeRecord> run_experiment(const FockState& state, const MeasurementModel& model,
                                          std::int64_t shots, std::uint64_t seed,
                                          int threads = 0);

/// Half-width an outcome grid must reach for the deterministic integrals.
double required_outcome_span(const FockState& state, const MeasurementModel& model);

/// Probability that the photon count after the measurement differs from
/// `from_n`, integrated over the grid (vacuum input: sum over n >= 1).
double jump_probability(const FockState& state, const MeasurementModel& model,
                        const QuadratureGrid& grid, int from_n = 0);

/// sum_n n * int P_n(x_m) (x_m^2 - dx^2) dx_m with exact matrix elements.
double measured_correlation(const FockState& state, const MeasurementModel& model,
                            const QuadratureGrid& grid);

/// Covariance of the output photon number with x_m^2, the statistically
/// standard counterpart of measured_correlation. For vacuum input the two
/// differ by <n>/4.
double covariance_correlation(const FockState& state, const MeasurementModel& model,
                              const QuadratureGrid& grid);

struct OperatorCorrelationTerms {
  double x2n = 0.0;  ///< <x^2 n>
  double xnx = 0.0;  ///< <x n x>
  double nx2 = 0.0;  ///< <n x^2>
  double x2 = 0.0;   ///< <x^2>
  double n = 0.0;    ///< <n>
  /// (x2n + 2 xnx + nx2) / 4 - x2 * n
  double value = 0.0;
};

/// Symmetrized operator-ordering correlation of x^2 and n in the given state.
/// Throws invalid-dimension unless the truncation holds two levels above the
/// state's support (and dim >= 4).
OperatorCorrelationTerms operator_correlation_terms(const FockState& state);
double operator_correlation(const FockState& state);

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;

  bool operator==(const Estimate&) const = default;
};

/// Deterministic counterparts passed to summarize().
struct ExactInputs {
  std::optional<double> jump_probability;
  std::optional<double> c_integral;
  std::optional<double> covariance;
  std::optional<double> operator_c;
};

struct CorrelationReport {
  double delta_x = 0.0;
  std::optional<std::int64_t> shots;

  // Sampled estimators (absent without shots).
  std::optional<Estimate> jump_fraction;
  /// mean of n (x_m^2 - dx^2)
  std::optional<Estimate> measured_c;
  /// cov(n, x_m^2)
  std::optional<Estimate> covariance_c;
  std::optional<Estimate> mean_x2_given_jump;

  // Exact quantities (standard error always zero).
  std::optional<Estimate> exact_jump_probability;
  std::optional<Estimate> exact_c_integral;
  std::optional<Estimate> exact_covariance;
  std::optional<Estimate> operator_c;

  bool operator==(const CorrelationReport&) const = default;
};

/// Throws empty-records for an empty record list. Jumps are counted as
/// photon_n != from_n.
CorrelationReport summarize(const std::vector<OutcomeRecord>& records, double delta_x,
                            const ExactInputs& exact, int from_n = 0);

/// Report with exact fields only.
CorrelationReport exact_report(double delta_x, const ExactInputs& exact);

void to_json(nlohmann::json& j, const Estimate& e);
void from_json(const nlohmann::json& j, Estimate& e);
void to_json(nlohmann::json& j, const CorrelationReport& r);
void from_json(const nlohmann::json& j, CorrelationReport& r);

}  // namespace bae
