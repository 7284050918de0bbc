#pragma once

// Two-mode simulation of the backaction-evading measurement circuit:
//
//   beam splitter(R) -> one OPA per arm -> beam splitter(R) -> homodyne(meter)
//
// The two optical lines are indexed as mode 0 ("upper") and mode 1 ("lower").
// The signal enters on the upper line and the meter vacuum on the lower line.
// The lower-arm OPA amplifies x (x -> a x, y -> y/a), the upper-arm OPA
// amplifies y (x -> x/a, y -> a y). With R = a^2/(a^2+1) the outputs swap
// lines: the signal leaves on the lower line and the meter on the upper line,
// where its x quadrature is detected.
//
// Beam splitters use the real orthogonal convention
//   U = exp(theta (a0^dag a1 - a0 a1^dag)),  cos^2(theta) = 1 - R,
// and OPAs are single-mode squeezers exp(r/2 (a^2 - a^dag^2)) with
// r = -ln(a) for amplify-x. Every unitary is the matrix exponential of its
// truncated generator, so it is exactly orthogonal on the truncated space.

#include <vector>

#include <Eigen/Dense>

#include "bae/fock.hpp"
#include "bae/quadrature.hpp"

namespace bae {

double reflectivity_for_gain(double gain_a);
double resolution_for_gain(double gain_a);

/// Both circuit lines are truncated at dim_meter (which defaults to
/// 2 * dim_signal); the signal output is reported on its first dim_signal
/// levels.
struct SetupParams {
  double gain_a = 0.0;
  int dim_signal = 0;
  int dim_meter = 0;
  /// Swap the two OPAs between the arms (diagnostic only; breaks the
  /// backaction-evading configuration).
  bool swap_arms = false;

  static SetupParams make(double gain_a, int dim_signal, int dim_meter = 0,
                          bool swap_arms = false);

  double reflectivity() const { return reflectivity_for_gain(gain_a); }
  double delta_x() const { return resolution_for_gain(gain_a); }
  int circuit_dim() const { return dim_meter; }
  void validate() const;
};

struct ModeDims {
  int mode0 = 0;
  int mode1 = 0;
};

class TwoModeState {
 public:
  /// Rows index mode 0, columns mode 1.
  explicit TwoModeState(ComplexMatrix amplitudes);

  static TwoModeState product(const FockState& mode0, const FockState& mode1);

  ModeDims dims() const;
  const ComplexMatrix& amplitudes() const { return amplitudes_; }
  ComplexMatrix& amplitudes() { return amplitudes_; }

  double squared_norm() const { return amplitudes_.squaredNorm(); }
  TwoModeState normalized() const;

  /// Photon-number distribution of one mode.
  std::vector<double> marginal(int mode) const;
  /// Population at n >= trusted_size(dim) in the given mode.
  double top_quarter_occupation(int mode) const;

 private:
  ComplexMatrix amplitudes_;
};

enum class SqueezeDirection { AmplifyX, AmplifyY };

/// Real orthogonal beam splitter, stored as one block per total photon number
/// (the generator conserves a0^dag a0 + a1^dag a1).
class BeamSplitter {
 public:
  BeamSplitter(double reflectivity, ModeDims dims);

  double reflectivity() const { return reflectivity_; }
  ModeDims dims() const { return dims_; }

  void apply(TwoModeState& state) const;
  /// Dense matrix on the flattened index n0 * dim1 + n1 (small dims only).
  Eigen::MatrixXd dense() const;

 private:
  struct Block {
    int first_n0 = 0;
    Eigen::MatrixXd unitary;
  };
  double reflectivity_;
  ModeDims dims_;
  std::vector<Block> blocks_;
};

/// Single-mode squeezer acting on one line of the two-mode space.
class Squeezer {
 public:
  Squeezer(double gain_a, int mode, SqueezeDirection direction, ModeDims dims);

  double gain() const { return gain_; }
  int mode() const { return mode_; }
  SqueezeDirection direction() const { return direction_; }
  const Eigen::MatrixXd& single_mode() const { return single_mode_; }

  void apply(TwoModeState& state) const;
  Eigen::MatrixXd dense() const;

 private:
  double gain_;
  int mode_;
  SqueezeDirection direction_;
  ModeDims dims_;
  Eigen::MatrixXd single_mode_;
};

/// Single-mode squeezing unitary: U^dag x U = a x, U^dag y U = y / a for
/// AmplifyX (reciprocal for AmplifyY), up to truncation.
Eigen::MatrixXd squeezing_unitary(double gain_a, SqueezeDirection direction, int dim);

BeamSplitter beam_splitter(double reflectivity, ModeDims dims);
Squeezer opa_squeezer(double gain_a, int mode, SqueezeDirection direction, ModeDims dims);

/// Mode roles at the circuit output.
inline constexpr int kMeterOutputMode = 0;
inline constexpr int kSignalOutputMode = 1;

/// Above this, truncation of the circuit or the signal output is reported as
/// overflow.
inline constexpr double kOverflowThreshold = 1e-6;

struct Propagation {
  TwoModeState output;
  /// Largest top-quarter occupation of either line after any element.
  double max_top_occupation = 0.0;
  /// Signal-output population outside trusted_size(dim_signal).
  double signal_leakage = 0.0;

  bool overflow() const {
    return max_top_occupation > kOverflowThreshold || signal_leakage > kOverflowThreshold;
  }
};

struct SetupOutcome {
  /// Probability density of the raw homodyne value.
  double density = 0.0;
  /// Normalized conditional signal output on dim_signal levels.
  FockState signal_out;
};

class SetupCircuit {
 public:
  explicit SetupCircuit(const SetupParams& params);

  const SetupParams& params() const { return params_; }

  /// Propagates signal_in (dim_signal levels) with a vacuum meter. Never
  /// throws on truncation; inspect Propagation::overflow().
  Propagation propagate(const FockState& signal_in) const;
  /// As propagate, but throws truncation-overflow.
  TwoModeState propagate_checked(const FockState& signal_in) const;

  /// Projects the meter output onto the x eigenfunction at `raw` (ideal
  /// homodyne detection).
  SetupOutcome homodyne(const TwoModeState& output, double raw) const;
  /// Unnormalized signal amplitudes on the full circuit line.
  ComplexVector homodyne_amplitudes(const TwoModeState& output, double raw) const;

  /// <x^k> of the meter output (k = 1, 2).
  double meter_moment(const TwoModeState& output, int power) const;

 private:
  SetupParams params_;
  BeamSplitter splitter_;
  Squeezer lower_opa_;
  Squeezer upper_opa_;
};

/// Full circuit for a single homodyne value (raw detector units).
SetupOutcome run_setup(const FockState& signal_in, const SetupParams& params,
                       double homodyne_result);

/// Affine map x_m = scale * raw + offset between the homodyne value and the
/// measurement-operator outcome.
struct OutcomeCalibration {
  double scale = 0.0;
  /// Residual mean mismatch in x_m units; zero by circuit parity.
  double offset = 0.0;
  /// max |P_setup - P_operator| / max P_operator over the fit grid.
  double residual = 0.0;
};

/// Above this residual the circuit does not realize the measurement operator.
inline constexpr double kCalibrationTolerance = 1e-2;

OutcomeCalibration calibrate_outcome_map(const SetupParams& params);
OutcomeCalibration calibrate_outcome_map(const SetupParams& params, const FockState& signal_in);

/// Setup density expressed in x_m units.
double calibrated_density(const SetupCircuit& circuit, const TwoModeState& output,
                          const OutcomeCalibration& calibration, double x_m);

struct EquivalenceReport {
  double defect = 0.0;
  double worst_x_m = 0.0;
  int outcomes_compared = 0;
  double max_top_occupation = 0.0;
  double signal_leakage = 0.0;
  bool overflow = false;
};

/// Outcome density floor below which outcomes are skipped by the comparison.
inline constexpr double kEquivalenceDensityFloor = 1e-6;

/// max over grid outcomes of |density_setup - density_operator| + trace
/// distance of the conditional signal outputs. Reports overflow instead of
/// throwing.
EquivalenceReport equivalence_report(const FockState& signal_in, const SetupParams& params,
                                     const QuadratureGrid& grid,
                                     const OutcomeCalibration& calibration);

/// As equivalence_report, but throws truncation-overflow.
double equivalence_defect(const FockState& signal_in, const SetupParams& params,
                          const QuadratureGrid& grid, const OutcomeCalibration& calibration);

/// Default comparison grid in x_m units.
QuadratureGrid default_equivalence_grid(const SetupParams& params, int count = 201);

}  // namespace bae
