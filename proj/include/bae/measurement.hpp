#pragma once

// Gaussian quadrature-measurement operator
//
//   P(x_m) = (2 pi dx^2)^(-1/4) exp(-(x_m - x)^2 / (4 dx^2)),
//
// its outcome density <psi|P^2|psi>, and the conditional post-measurement
// state P|psi>/sqrt(density).

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bae/fock.hpp"
#include "bae/quadrature.hpp"

namespace bae {

enum class EvalStrategy {
  /// Square completed analytically, remaining polynomial integrated exactly by
  /// a Gauss-Hermite rule of sufficient order.
  ClosedForm,
  /// Brute-force trapezoid integration over a dense position grid. Kept as an
  /// independent cross-check of ClosedForm.
  Quadrature,
};

std::string_view to_string(EvalStrategy strategy);

/// Densities below this are refused as conditioning events.
inline constexpr double kConditioningFloor = 1e-300;

class MeasurementModel {
 public:
  MeasurementModel(double delta_x, int dim, EvalStrategy strategy = EvalStrategy::ClosedForm);

  double delta_x() const { return delta_x_; }
  int dim() const { return dim_; }
  EvalStrategy strategy() const { return strategy_; }

  /// Matrix of P(x_m) in the truncated number basis (real, symmetric).
  FockOperator operator_at(double x_m) const;

  /// Matrix of P(x_m)^2 evaluated directly as a function of x, so it does not
  /// suffer from truncating the intermediate sum of P * P.
  FockOperator squared_operator_at(double x_m) const;

  /// P(x_m)|psi>, unnormalized. Amplitudes above dim are not represented.
  ComplexVector apply(double x_m, const FockState& state) const;

  /// <psi|P(x_m)^2|psi>.
  double squared_expectation(double x_m, const FockState& state) const;

 private:
  // Rows are nodes, columns photon numbers: entry (k, n) = sqrt(W_k) psi_n(x_k)
  // so that the kernel integral for width `sigma` is G^T G.
  Eigen::MatrixXd kernel_factor(double x_m, double sigma, double prefactor) const;

  double delta_x_;
  int dim_;
  EvalStrategy strategy_;
  int gh_order_ = 0;
  GaussHermiteRule rule_;
  // Quadrature strategy only: fixed position grid and psi_n on it.
  std::vector<double> positions_;
  double position_step_ = 0.0;
  Eigen::MatrixXd position_table_;
};

/// <psi|P^2(x_m)|psi>: probability density of the outcome x_m.
double outcome_density(const FockState& state, const MeasurementModel& model, double x_m);

/// P(x_m)|psi> normalized. Throws degenerate-conditioning when the outcome
/// density is below kConditioningFloor.
FockState conditional_state(const FockState& state, const MeasurementModel& model, double x_m);

/// |<n|P(x_m)|psi>|^2, the joint density of outcome x_m and n photons after
/// the measurement.
double joint_photon_density(const FockState& state, const MeasurementModel& model, double x_m,
                            int n);

/// Large-resolution form of the vacuum one-photon joint density:
/// (2 pi dx^2)^(-1/2) * x_m^2 / (4 dx^2)^2 * exp(-x_m^2 / (2 dx^2)).
double asymptotic_p1(double delta_x, double x_m);

struct OutcomeDensityTable {
  QuadratureGrid grid;
  std::vector<double> density;
  /// per_photon[n][k] = joint density for n photons at grid.nodes[k].
  std::vector<std::vector<double>> per_photon;

  double total_probability() const;
};

OutcomeDensityTable outcome_density_table(const FockState& state, const MeasurementModel& model,
                                          const QuadratureGrid& grid,
                                          std::optional<int> n_max = std::nullopt);

/// Minimum grid half-width accepted by completeness_defect.
double completeness_span(const MeasurementModel& model);

enum class CompletenessForm {
  /// P^2 evaluated as its own Gaussian kernel.
  DirectSquare,
  /// Product of the two truncated P matrices; loses accuracy near the
  /// truncation edge. Diagnostic only.
  TruncatedProduct,
};

/// sum_k w_k P^2(x_k) - 1 on the full truncated space. Throws grid-too-narrow
/// when the grid is narrower than completeness_span(model).
Eigen::MatrixXd completeness_residual(const MeasurementModel& model, const QuadratureGrid& grid,
                                      CompletenessForm form = CompletenessForm::DirectSquare);

/// max |sum_k w_k P^2(x_k) - 1| over the trusted subspace.
double completeness_defect(const MeasurementModel& model, const QuadratureGrid& grid);

/// Default n_max for per-photon tables.
inline constexpr int kDefaultPhotonTableMax = 4;

}  // namespace bae
