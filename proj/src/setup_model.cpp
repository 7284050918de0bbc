#include "bae/setup_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "bae/error.hpp"
#include "bae/measurement.hpp"

namespace bae {
namespace {

void require_mode(int mode) {
  if (mode != 0 && mode != 1) fail(ErrorKind::InvalidParameter, "mode index must be 0 or 1");
}

void require_dims(ModeDims dims) {
  if (dims.mode0 < 2 || dims.mode1 < 2) {
    fail(ErrorKind::InvalidDimension, "each mode needs a truncation dimension >= 2");
  }
}

FockState embed(const FockState& state, int dim) {
  ComplexVector v = ComplexVector::Zero(dim);
  v.head(state.dim()) = state.amplitudes();
  return FockState(std::move(v));
}

}  // namespace

double reflectivity_for_gain(double gain_a) {
  if (!(gain_a > 0.0) || !std::isfinite(gain_a)) {
    fail(ErrorKind::InvalidParameter, "OPA gain must be positive and finite");
  }
  return gain_a * gain_a / (gain_a * gain_a + 1.0);
}

double resolution_for_gain(double gain_a) {
  if (!(gain_a > 1.0) || !std::isfinite(gain_a)) {
    fail(ErrorKind::InvalidParameter, "OPA gain must exceed 1 for a finite resolution");
  }
  return gain_a / (2.0 * (gain_a * gain_a - 1.0));
}

// ---------------------------------------------------------------------------
// SetupParams

SetupParams SetupParams::make(double gain_a, int dim_signal, int dim_meter, bool swap_arms) {
  SetupParams p;
  p.gain_a = gain_a;
  p.dim_signal = dim_signal;
  p.dim_meter = dim_meter > 0 ? dim_meter : 2 * dim_signal;
  p.swap_arms = swap_arms;
  p.validate();
  return p;
}

void SetupParams::validate() const {
  if (!(gain_a > 1.0) || !std::isfinite(gain_a)) {
    fail(ErrorKind::InvalidParameter, "OPA gain must satisfy a > 1");
  }
  if (dim_signal < 2) fail(ErrorKind::InvalidDimension, "signal dimension must be >= 2");
  if (dim_meter < dim_signal) {
    fail(ErrorKind::InvalidDimension, "meter/circuit dimension must be >= signal dimension");
  }
}

// ---------------------------------------------------------------------------
// TwoModeState

TwoModeState::TwoModeState(ComplexMatrix amplitudes) : amplitudes_(std::move(amplitudes)) {
  require_dims({static_cast<int>(amplitudes_.rows()), static_cast<int>(amplitudes_.cols())});
}

TwoModeState TwoModeState::product(const FockState& mode0, const FockState& mode1) {
  return TwoModeState(mode0.amplitudes() * mode1.amplitudes().transpose());
}

ModeDims TwoModeState::dims() const {
  return {static_cast<int>(amplitudes_.rows()), static_cast<int>(amplitudes_.cols())};
}

TwoModeState TwoModeState::normalized() const {
  const double nrm = amplitudes_.norm();
  if (!(nrm > 1e-150)) fail(ErrorKind::DegenerateConditioning, "cannot normalize a zero state");
  return TwoModeState(amplitudes_ / nrm);
}

std::vector<double> TwoModeState::marginal(int mode) const {
  require_mode(mode);
  const Eigen::VectorXd p = mode == 0 ? Eigen::VectorXd(amplitudes_.cwiseAbs2().rowwise().sum())
                                      : Eigen::VectorXd(amplitudes_.cwiseAbs2().colwise().sum().transpose());
  return {p.data(), p.data() + p.size()};
}

double TwoModeState::top_quarter_occupation(int mode) const {
  const auto p = marginal(mode);
  const int dim = static_cast<int>(p.size());
  double sum = 0.0;
  for (int n = trusted_size(dim); n < dim; ++n) sum += p[n];
  return sum;
}

// ---------------------------------------------------------------------------
// Beam splitter

BeamSplitter::BeamSplitter(double reflectivity, ModeDims dims)
    : reflectivity_(reflectivity), dims_(dims) {
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "beam splitter reflectivity must lie in [0, 1]");
  }
  require_dims(dims);
  const double theta = std::acos(std::sqrt(1.0 - reflectivity));
  const int max_total = dims.mode0 + dims.mode1 - 2;
  blocks_.reserve(max_total + 1);
  for (int total = 0; total <= max_total; ++total) {
    const int first = std::max(0, total - dims.mode1 + 1);
    const int last = std::min(total, dims.mode0 - 1);
    const int size = last - first + 1;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i) {
      const int n0 = first + i;
      const int n1 = total - n0;
      // a0^dag a1 |n0, n1> = sqrt((n0 + 1) n1) |n0 + 1, n1 - 1>
      if (i + 1 < size) gen(i + 1, i) += std::sqrt((n0 + 1.0) * n1);
      // a0 a1^dag |n0, n1> = sqrt(n0 (n1 + 1)) |n0 - 1, n1 + 1>
      if (i > 0) gen(i - 1, i) -= std::sqrt(n0 * (n1 + 1.0));
    }
    blocks_.push_back({first, (theta * gen).exp()});
  }
}

void BeamSplitter::apply(TwoModeState& state) const {
  const ModeDims d = state.dims();
  if (d.mode0 != dims_.mode0 || d.mode1 != dims_.mode1) {
    fail(ErrorKind::DimensionMismatch, "beam splitter and state dimensions differ");
  }
  ComplexMatrix& amp = state.amplitudes();
  ComplexVector in;
  for (std::size_t total = 0; total < blocks_.size(); ++total) {
    const Block& b = blocks_[total];
    const int size = static_cast<int>(b.unitary.rows());
    in.resize(size);
    for (int i = 0; i < size; ++i) in(i) = amp(b.first_n0 + i, int(total) - b.first_n0 - i);
    const ComplexVector out = b.unitary.cast<Complex>() * in;
    for (int i = 0; i < size; ++i) amp(b.first_n0 + i, int(total) - b.first_n0 - i) = out(i);
  }
}

Eigen::MatrixXd BeamSplitter::dense() const {
  const int n = dims_.mode0 * dims_.mode1;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t total = 0; total < blocks_.size(); ++total) {
    const Block& b = blocks_[total];
    const int size = static_cast<int>(b.unitary.rows());
    for (int i = 0; i < size; ++i) {
      const int row = (b.first_n0 + i) * dims_.mode1 + (int(total) - b.first_n0 - i);
      for (int j = 0; j < size; ++j) {
        const int col = (b.first_n0 + j) * dims_.mode1 + (int(total) - b.first_n0 - j);
        u(row, col) = b.unitary(i, j);
      }
    }
  }
  return u;
}

BeamSplitter beam_splitter(double reflectivity, ModeDims dims) {
  return BeamSplitter(reflectivity, dims);
}

// ---------------------------------------------------------------------------
// Squeezer

Eigen::MatrixXd squeezing_unitary(double gain_a, SqueezeDirection direction, int dim) {
  if (!(gain_a > 0.0) || !std::isfinite(gain_a)) {
    fail(ErrorKind::InvalidParameter, "OPA gain must be positive and finite");
  }
  if (dim < 2) fail(ErrorKind::InvalidDimension, "squeezer dimension must be >= 2");
  // exp(r/2 (a^2 - a^dag^2)) maps x -> exp(-r) x.
  const double r = direction == SqueezeDirection::AmplifyX ? -std::log(gain_a) : std::log(gain_a);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd gen = 0.5 * r * (a2 - a2.transpose());
  return gen.exp();
}

Squeezer::Squeezer(double gain_a, int mode, SqueezeDirection direction, ModeDims dims)
    : gain_(gain_a), mode_(mode), direction_(direction), dims_(dims) {
  require_mode(mode);
  require_dims(dims);
  single_mode_ = squeezing_unitary(gain_a, direction, mode == 0 ? dims.mode0 : dims.mode1);
}

void Squeezer::apply(TwoModeState& state) const {
  const ModeDims d = state.dims();
  if (d.mode0 != dims_.mode0 || d.mode1 != dims_.mode1) {
    fail(ErrorKind::DimensionMismatch, "squeezer and state dimensions differ");
  }
  const ComplexMatrix u = single_mode_.cast<Complex>();
  if (mode_ == 0) {
    state.amplitudes() = u * state.amplitudes();
  } else {
    state.amplitudes() = state.amplitudes() * u.transpose();
  }
}

Eigen::MatrixXd Squeezer::dense() const {
  const Eigen::MatrixXd id0 = Eigen::MatrixXd::Identity(dims_.mode0, dims_.mode0);
  const Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(dims_.mode1, dims_.mode1);
  const Eigen::MatrixXd& left = mode_ == 0 ? single_mode_ : id0;
  const Eigen::MatrixXd& right = mode_ == 0 ? id1 : single_mode_;
  const int n = dims_.mode0 * dims_.mode1;
  Eigen::MatrixXd u(n, n);
  for (int i0 = 0; i0 < dims_.mode0; ++i0)
    for (int j0 = 0; j0 < dims_.mode0; ++j0)
      u.block(i0 * dims_.mode1, j0 * dims_.mode1, dims_.mode1, dims_.mode1) = left(i0, j0) * right;
  return u;
}

Squeezer opa_squeezer(double gain_a, int mode, SqueezeDirection direction, ModeDims dims) {
  return Squeezer(gain_a, mode, direction, dims);
}

// ---------------------------------------------------------------------------
// Circuit

SetupCircuit::SetupCircuit(const SetupParams& params)
    : params_((params.validate(), params)),
      splitter_(params.reflectivity(), {params.circuit_dim(), params.circuit_dim()}),
      lower_opa_(params.gain_a, 1,
                 params.swap_arms ? SqueezeDirection::AmplifyY : SqueezeDirection::AmplifyX,
                 {params.circuit_dim(), params.circuit_dim()}),
      upper_opa_(params.gain_a, 0,
                 params.swap_arms ? SqueezeDirection::AmplifyX : SqueezeDirection::AmplifyY,
                 {params.circuit_dim(), params.circuit_dim()}) {}

Propagation SetupCircuit::propagate(const FockState& signal_in) const {
  if (signal_in.dim() != params_.dim_signal) {
    fail(ErrorKind::DimensionMismatch, "signal input must have dim_signal levels");
  }
  const int dim = params_.circuit_dim();
  TwoModeState state = TwoModeState::product(embed(signal_in.normalized(), dim),
                                             FockState::vacuum(dim));
  double occupation = 0.0;
  auto track = [&] {
    occupation = std::max({occupation, state.top_quarter_occupation(0),
                           state.top_quarter_occupation(1)});
  };
  splitter_.apply(state);
  track();
  lower_opa_.apply(state);
  upper_opa_.apply(state);
  track();
  splitter_.apply(state);
  track();

  const auto signal = state.marginal(kSignalOutputMode);
  double leakage = 0.0;
  for (int n = trusted_size(params_.dim_signal); n < dim; ++n) leakage += signal[n];
  return {std::move(state), occupation, leakage};
}

TwoModeState SetupCircuit::propagate_checked(const FockState& signal_in) const {
  Propagation p = propagate(signal_in);
  if (p.overflow()) {
    fail(ErrorKind::TruncationOverflow,
         "circuit truncation too small for gain " + std::to_string(params_.gain_a) +
             " (top-quarter occupation " + std::to_string(p.max_top_occupation) +
             ", signal leakage " + std::to_string(p.signal_leakage) +
             "); try a larger dimension such as " + std::to_string(params_.dim_signal * 3 / 2));
  }
  return std::move(p.output);
}

ComplexVector SetupCircuit::homodyne_amplitudes(const TwoModeState& output, double raw) const {
  if (!std::isfinite(raw)) fail(ErrorKind::InvalidParameter, "homodyne value must be finite");
  const int dim = params_.circuit_dim();
  const auto psi = oscillator_wavefunctions(dim, raw);
  const Eigen::Map<const Eigen::VectorXd> w(psi.data(), dim);
  // Meter is mode 0 (rows); contract it away.
  return output.amplitudes().transpose() * w.cast<Complex>();
}

SetupOutcome SetupCircuit::homodyne(const TwoModeState& output, double raw) const {
  const ComplexVector v = homodyne_amplitudes(output, raw);
  const double density = v.squaredNorm();
  const ComplexVector head = v.head(params_.dim_signal);
  if (!(head.squaredNorm() > kConditioningFloor)) {
    fail(ErrorKind::DegenerateConditioning, "homodyne value has negligible probability density");
  }
  return {density, FockState(head).normalized()};
}

double SetupCircuit::meter_moment(const TwoModeState& output, int power) const {
  const int dim = params_.circuit_dim();
  const ComplexMatrix xa = quadrature_x(dim).entries() * output.amplitudes();
  if (power == 1) return (output.amplitudes().adjoint() * xa).trace().real();
  if (power == 2) return xa.squaredNorm();
  fail(ErrorKind::InvalidParameter, "meter_moment supports powers 1 and 2");
}

SetupOutcome run_setup(const FockState& signal_in, const SetupParams& params,
                       double homodyne_result) {
  const SetupCircuit circuit(params);
  return circuit.homodyne(circuit.propagate_checked(signal_in), homodyne_result);
}

// ---------------------------------------------------------------------------
// Calibration and equivalence

double calibrated_density(const SetupCircuit& circuit, const TwoModeState& output,
                          const OutcomeCalibration& calibration, double x_m) {
  const double raw = (x_m - calibration.offset) / calibration.scale;
  return circuit.homodyne_amplitudes(output, raw).squaredNorm() / std::abs(calibration.scale);
}

OutcomeCalibration calibrate_outcome_map(const SetupParams& params) {
  return calibrate_outcome_map(params, FockState::vacuum(params.dim_signal));
}

OutcomeCalibration calibrate_outcome_map(const SetupParams& params, const FockState& signal_in) {
  const SetupCircuit circuit(params);
  const TwoModeState output = circuit.propagate_checked(signal_in);
  const FockState input = signal_in.normalized();
  const MeasurementModel model(params.delta_x(), params.dim_signal);

  // Outcome moments predicted by the measurement operator.
  const double x_mean = quadrature_x(params.dim_signal).expectation(input).real();
  const double x_sq = quadrature_x(params.dim_signal).apply(input).squared_norm();
  const double target_var = params.delta_x() * params.delta_x() + x_sq - x_mean * x_mean;

  const double raw_mean = circuit.meter_moment(output, 1);
  const double raw_var = circuit.meter_moment(output, 2) - raw_mean * raw_mean;
  if (!(raw_var > 0.0)) fail(ErrorKind::SetupMismatch, "meter output carries no x variance");
  const double guess = std::sqrt(target_var / raw_var);

  const double span = 6.0 * std::sqrt(target_var) + std::abs(x_mean);
  const QuadratureGrid grid = make_grid(GridKind::Uniform, span, 241);
  std::vector<double> target(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    target[k] = outcome_density(input, model, grid.nodes[k]);
  }

  auto mismatch = [&](double scale, bool sup) {
    const OutcomeCalibration c{scale, 0.0, 0.0};
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = calibrated_density(circuit, output, c, grid.nodes[k]) - target[k];
      acc = sup ? std::max(acc, std::abs(d)) : acc + d * d;
    }
    return acc;
  };

  // Golden-section refinement of |scale| around the moment-matched guess.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.8 * guess;
  double hi = 1.25 * guess;
  double m1 = hi - phi * (hi - lo);
  double m2 = lo + phi * (hi - lo);
  double f1 = mismatch(m1, false);
  double f2 = mismatch(m2, false);
  while (hi - lo > 1e-12 * guess) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - phi * (hi - lo);
      f1 = mismatch(m1, false);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + phi * (hi - lo);
      f2 = mismatch(m2, false);
    }
  }
  double scale = 0.5 * (lo + hi);

  // The densities do not fix the sign; the conditional states do.
  const double probe = std::sqrt(target_var) + x_mean;
  const FockState expected = conditional_state(input, model, probe);
  const double d_pos =
      trace_distance(circuit.homodyne(output, probe / scale).signal_out, expected);
  const double d_neg =
      trace_distance(circuit.homodyne(output, -probe / scale).signal_out, expected);
  if (d_neg < d_pos) scale = -scale;

  OutcomeCalibration result;
  result.scale = scale;
  result.offset = x_mean - scale * raw_mean;
  double peak = 0.0;
  for (double t : target) peak = std::max(peak, t);
  result.residual = mismatch(scale, true) / peak;
  if (result.residual > kCalibrationTolerance) {
    fail(ErrorKind::SetupMismatch, "calibrated setup density deviates from the measurement "
                                   "operator by " +
                                       std::to_string(result.residual) + " (relative)");
  }
  return result;
}

QuadratureGrid default_equivalence_grid(const SetupParams& params, int count) {
  const double dx = params.delta_x();
  return make_grid(GridKind::Uniform, 6.0 * std::sqrt(dx * dx + 1.0), count);
}

EquivalenceReport equivalence_report(const FockState& signal_in, const SetupParams& params,
                                     const QuadratureGrid& grid,
                                     const OutcomeCalibration& calibration) {
  const SetupCircuit circuit(params);
  const Propagation prop = circuit.propagate(signal_in);
  const FockState input = signal_in.normalized();
  const MeasurementModel model(params.delta_x(), params.dim_signal);

  EquivalenceReport report;
  report.max_top_occupation = prop.max_top_occupation;
  report.signal_leakage = prop.signal_leakage;
  report.overflow = prop.overflow();
  for (double x_m : grid.nodes) {
    const double p_op = outcome_density(input, model, x_m);
    if (p_op < kEquivalenceDensityFloor) continue;
    const double p_setup = calibrated_density(circuit, prop.output, calibration, x_m);
    const double raw = (x_m - calibration.offset) / calibration.scale;
    const ComplexVector v = circuit.homodyne_amplitudes(prop.output, raw);
    const FockState setup_out(ComplexVector(v.head(params.dim_signal)));
    const double distance = trace_distance(setup_out, conditional_state(input, model, x_m));
    const double defect = std::abs(p_setup - p_op) + distance;
    ++report.outcomes_compared;
    if (defect > report.defect) {
      report.defect = defect;
      report.worst_x_m = x_m;
    }
  }
  return report;
}

double equivalence_defect(const FockState& signal_in, const SetupParams& params,
                          const QuadratureGrid& grid, const OutcomeCalibration& calibration) {
  const EquivalenceReport report = equivalence_report(signal_in, params, grid, calibration);
  if (report.overflow) {
    fail(ErrorKind::TruncationOverflow,
         "circuit truncation too small (top-quarter occupation " +
             std::to_string(report.max_top_occupation) + ", signal leakage " +
             std::to_string(report.signal_leakage) + "); increase the dimension");
  }
  return report.defect;
}

}  // namespace bae
