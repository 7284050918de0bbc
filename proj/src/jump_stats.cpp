#include "bae/jump_stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "bae/error.hpp"

namespace bae {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

double expected_x2(const FockState& state) {
  const FockState s = state.normalized();
  const FockOperator x = quadrature_x(s.dim());
  return (x * x).expectation(s).real();
}

void require_grid(const FockState& state, const MeasurementModel& model,
                  const QuadratureGrid& grid) {
  if (state.dim() != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "state dim " + std::to_string(state.dim()) +
                                           " differs from model dim " +
                                           std::to_string(model.dim()));
  }
  const double needed = required_outcome_span(state, model);
  if (grid.span() < needed * (1.0 - 1e-9)) {
    fail(ErrorKind::GridTooNarrow, "outcome grid half-width " + std::to_string(grid.span()) +
                                       " is below the required " + std::to_string(needed) +
                                       "; widen the grid");
  }
}

// Visits (weight, x_m, |<n|P(x_m)|psi>|^2 for all n) across the grid.
template <typename F>
void for_each_joint(const FockState& state, const MeasurementModel& model,
                    const QuadratureGrid& grid, F&& visit) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ComplexVector v = model.apply(grid.nodes[k], state);
    visit(grid.weights[k], grid.nodes[k], v.cwiseAbs2());
  }
}

Estimate mean_estimate(double sum, double sum_sq, std::int64_t count) {
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  double se = 0.0;
  if (count > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  return {mean, se};
}

std::optional<Estimate> exact(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return Estimate{*v, 0.0};
}

}  // namespace

// ---------------------------------------------------------------------------
// Random streams

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Sampling

OutcomeSampler::OutcomeSampler(const FockState& state, const MeasurementModel& model) {
  if (state.dim() != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "state and model dimensions differ");
  }
  const FockState s = state.normalized();
  const double dx = model.delta_x();
  const double span = 6.0 * std::sqrt(dx * dx + expected_x2(s) + 1.0);
  const double step = std::min(dx, 0.5) / 16.0;
  const double cells = std::ceil(2.0 * span / step);
  if (!(cells < 4e6)) {
    fail(ErrorKind::GridTooNarrow, "sampling grid would need " + std::to_string(cells) +
                                       " cells; resolution too fine for its span");
  }
  grid_ = make_grid(GridKind::Uniform, span, static_cast<int>(cells) + 1);

  const std::size_t count = grid_.size();
  density_.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    density_[k] = std::max(0.0, outcome_density(s, model, grid_.nodes[k]));
  }
  cdf_.assign(count, 0.0);
  for (std::size_t k = 1; k < count; ++k) {
    const double h = grid_.nodes[k] - grid_.nodes[k - 1];
    cdf_[k] = cdf_[k - 1] + 0.5 * h * (density_[k] + density_[k - 1]);
  }
  if (!(cdf_.back() > 0.0)) {
    fail(ErrorKind::DegenerateConditioning, "outcome density vanishes on the sampling grid");
  }
}

double OutcomeSampler::quantile(double u) const {
  const double target = u * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
  k = std::clamp<std::size_t>(k, 1, cdf_.size() - 1) - 1;

  // Linear density f(t) = f0 + s t on the cell; solve f0 t + s t^2 / 2 = r.
  const double x0 = grid_.nodes[k];
  const double h = grid_.nodes[k + 1] - x0;
  const double f0 = density_[k];
  const double slope = (density_[k + 1] - f0) / h;
  const double r = std::max(0.0, target - cdf_[k]);
  const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * r);
  const double denom = f0 + std::sqrt(disc);
  double t = denom > 0.0 ? 2.0 * r / denom : 0.0;
  t = std::clamp(t, 0.0, h);
  return x0 + t;
}

double OutcomeSampler::sample(RandomStream& rng) const { return quantile(rng.uniform()); }

double sample_outcome(const FockState& state, const MeasurementModel& model, RandomStream& rng) {
  return OutcomeSampler(state, model).sample(rng);
}

int sample_photon_number(const FockState& state_out, RandomStream& rng) {
  const ComplexVector& v = state_out.amplitudes();
  const double total = v.squaredNorm();
  if (!(total > 0.0) || !std::isfinite(total)) {
    fail(ErrorKind::DegenerateConditioning, "cannot count photons on a zero state");
  }
  const double target = rng.uniform() * total;
  double acc = 0.0;
  int last = 0;
  for (int n = 0; n < state_out.dim(); ++n) {
    const double p = std::norm(v(n));
    if (p <= 0.0) continue;
    acc += p;
    last = n;
    if (target < acc) return n;
  }
  return last;
}

int default_thread_count() {
  if (const char* env = std::getenv("BAE_QND_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<OutcomeRecord> run_experiment(const FockState& state, const MeasurementModel& model,
                                          std::int64_t shots, std::uint64_t seed,
                                          int threads) {
  if (shots < 1) {
    fail(ErrorKind::InvalidParameter, "shots must be >= 1, got " + std::to_string(shots));
  }
  const FockState s = state.normalized();
  const OutcomeSampler sampler(s, model);

  std::vector<OutcomeRecord> records(static_cast<std::size_t>(shots));
  const std::int64_t streams = (shots + kShotsPerStream - 1) / kShotsPerStream;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    try {
      for (std::int64_t id = next++; id < streams && !failed; id = next++) {
        RandomStream rng(seed, static_cast<std::uint64_t>(id));
        const std::int64_t begin = id * kShotsPerStream;
        const std::int64_t end = std::min(shots, begin + kShotsPerStream);
        for (std::int64_t i = begin; i < end; ++i) {
          const double x_m = sampler.sample(rng);
          const ComplexVector v = model.apply(x_m, s);
          if (!(v.squaredNorm() > kConditioningFloor)) {
            fail(ErrorKind::DegenerateConditioning,
                 "sampled outcome " + std::to_string(x_m) + " has negligible density");
          }
          const int n = sample_photon_number(FockState(v), rng);
          records[static_cast<std::size_t>(i)] = {x_m, n, i, static_cast<std::uint64_t>(id)};
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  };

  const int count = static_cast<int>(
      std::min<std::int64_t>(threads > 0 ? threads : default_thread_count(), streams));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

// ---------------------------------------------------------------------------
// Deterministic integrals

double required_outcome_span(const FockState& state, const MeasurementModel& model) {
  const double dx = model.delta_x();
  return 6.0 * std::sqrt(dx * dx + expected_x2(state));
}

double jump_probability(const FockState& state, const MeasurementModel& model,
                        const QuadratureGrid& grid, int from_n) {
  if (from_n < 0 || from_n >= model.dim()) {
    fail(ErrorKind::OutOfRange, "reference photon number " + std::to_string(from_n) +
                                    " outside truncation " + std::to_string(model.dim()));
  }
  require_grid(state, model, grid);
  const FockState s = state.normalized();
  double total = 0.0;
  for_each_joint(s, model, grid, [&](double w, double, const Eigen::VectorXd& p) {
    total += w * (p.sum() - p(from_n));
  });
  return total;
}

double measured_correlation(const FockState& state, const MeasurementModel& model,
                            const QuadratureGrid& grid) {
  require_grid(state, model, grid);
  const FockState s = state.normalized();
  const Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(model.dim(), 0.0, model.dim() - 1.0);
  const double dx2 = model.delta_x() * model.delta_x();
  double total = 0.0;
  for_each_joint(s, model, grid, [&](double w, double x, const Eigen::VectorXd& p) {
    total += w * n.dot(p) * (x * x - dx2);
  });
  return total;
}

double covariance_correlation(const FockState& state, const MeasurementModel& model,
                              const QuadratureGrid& grid) {
  require_grid(state, model, grid);
  const FockState s = state.normalized();
  const Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(model.dim(), 0.0, model.dim() - 1.0);
  double e_nx2 = 0.0;
  double e_x2 = 0.0;
  double e_n = 0.0;
  for_each_joint(s, model, grid, [&](double w, double x, const Eigen::VectorXd& p) {
    const double mean_n = n.dot(p);
    e_nx2 += w * mean_n * x * x;
    e_x2 += w * p.sum() * x * x;
    e_n += w * mean_n;
  });
  return e_nx2 - e_x2 * e_n;
}

OperatorCorrelationTerms operator_correlation_terms(const FockState& state) {
  const int dim = state.dim();
  const int top = std::max(0, state.support_top());
  const int needed = std::max(4, top + 3);
  if (dim < needed) {
    fail(ErrorKind::InvalidDimension, "operator correlation needs dim >= " +
                                          std::to_string(needed) + " for this state, got " +
                                          std::to_string(dim));
  }
  const FockState s = state.normalized();
  const FockOperator x = quadrature_x(dim);
  const FockOperator n = number_operator(dim);
  const FockOperator x2 = x * x;

  OperatorCorrelationTerms t;
  t.x2n = (x2 * n).expectation(s).real();
  t.xnx = (x * n * x).expectation(s).real();
  t.nx2 = (n * x2).expectation(s).real();
  t.x2 = x2.expectation(s).real();
  t.n = n.expectation(s).real();
  t.value = 0.25 * (t.x2n + 2.0 * t.xnx + t.nx2) - t.x2 * t.n;
  return t;
}

double operator_correlation(const FockState& state) {
  return operator_correlation_terms(state).value;
}

// ---------------------------------------------------------------------------
// Reports

CorrelationReport exact_report(double delta_x, const ExactInputs& in) {
  CorrelationReport r;
  r.delta_x = delta_x;
  r.exact_jump_probability = exact(in.jump_probability);
  r.exact_c_integral = exact(in.c_integral);
  r.exact_covariance = exact(in.covariance);
  r.operator_c = exact(in.operator_c);
  return r;
}

CorrelationReport summarize(const std::vector<OutcomeRecord>& records, double delta_x,
                            const ExactInputs& in, int from_n) {
  if (records.empty()) fail(ErrorKind::EmptyRecords, "no records to summarize");
  CorrelationReport r = exact_report(delta_x, in);
  const auto count = static_cast<std::int64_t>(records.size());
  r.shots = count;
  const double dx2 = delta_x * delta_x;

  double jumps = 0.0;
  double c_sum = 0.0, c_sq = 0.0;
  double n_sum = 0.0, x2_sum = 0.0, nx2_sum = 0.0;
  double jx2_sum = 0.0, jx2_sq = 0.0;
  for (const auto& rec : records) {
    const double n = rec.photon_n;
    const double x2 = rec.x_m * rec.x_m;
    const double c = n * (x2 - dx2);
    c_sum += c;
    c_sq += c * c;
    n_sum += n;
    x2_sum += x2;
    nx2_sum += n * x2;
    if (rec.photon_n != from_n) {
      jumps += 1.0;
      jx2_sum += x2;
      jx2_sq += x2 * x2;
    }
  }
  r.jump_fraction = mean_estimate(jumps, jumps, count);
  r.measured_c = mean_estimate(c_sum, c_sq, count);

  // Delta-method error for cov(n, x^2) from its influence function.
  const double N = static_cast<double>(count);
  const double mn = n_sum / N;
  const double mx = x2_sum / N;
  const double cov = nx2_sum / N - mn * mx;
  double infl_sq = 0.0;
  for (const auto& rec : records) {
    const double d = (rec.photon_n - mn) * (rec.x_m * rec.x_m - mx) - cov;
    infl_sq += d * d;
  }
  const double cov_se = count > 1 ? std::sqrt(infl_sq / (N - 1.0) / N) : 0.0;
  r.covariance_c = Estimate{cov, cov_se};

  if (jumps > 0.0) {
    r.mean_x2_given_jump = mean_estimate(jx2_sum, jx2_sq, static_cast<std::int64_t>(jumps));
  }
  return r;
}

void to_json(nlohmann::json& j, const Estimate& e) {
  j = nlohmann::json{{"value", e.value}, {"standard_error", e.standard_error}};
}

void from_json(const nlohmann::json& j, Estimate& e) {
  e.value = j.at("value").get<double>();
  e.standard_error = j.at("standard_error").get<double>();
}

namespace {

template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void take(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) {
    v = j.at(key).get<T>();
  } else {
    v.reset();
  }
}

}  // namespace

void to_json(nlohmann::json& j, const CorrelationReport& r) {
  j = nlohmann::json::object();
  j["delta_x"] = r.delta_x;
  put(j, "shots", r.shots);
  put(j, "jump_fraction", r.jump_fraction);
  put(j, "measured_c", r.measured_c);
  put(j, "covariance_c", r.covariance_c);
  put(j, "mean_x2_given_jump", r.mean_x2_given_jump);
  put(j, "exact_jump_probability", r.exact_jump_probability);
  put(j, "exact_c_integral", r.exact_c_integral);
  put(j, "exact_covariance", r.exact_covariance);
  put(j, "operator_c", r.operator_c);
}

void from_json(const nlohmann::json& j, CorrelationReport& r) {
  r.delta_x = j.at("delta_x").get<double>();
  take(j, "shots", r.shots);
  take(j, "jump_fraction", r.jump_fraction);
  take(j, "measured_c", r.measured_c);
  take(j, "covariance_c", r.covariance_c);
  take(j, "mean_x2_given_jump", r.mean_x2_given_jump);
  take(j, "exact_jump_probability", r.exact_jump_probability);
  take(j, "exact_c_integral", r.exact_c_integral);
  take(j, "exact_covariance", r.exact_covariance);
  take(j, "operator_c", r.operator_c);
}

}  // namespace bae
