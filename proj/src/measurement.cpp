#include "bae/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bae/error.hpp"

namespace bae {
namespace {

constexpr double kPi = std::numbers::pi;

// Dense position grid for the brute-force strategy.
constexpr double kPositionStep = 0.01;
constexpr double kPositionMargin = 8.0;

void require_finite(double x_m) {
  if (!std::isfinite(x_m)) fail(ErrorKind::InvalidParameter, "measurement outcome must be finite");
}

void require_match(const FockState& state, const MeasurementModel& model) {
  if (state.dim() != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "state dimension " + std::to_string(state.dim()) +
                                           " does not match model dimension " +
                                           std::to_string(model.dim()));
  }
}

// G^T (G v) for real G and complex v.
ComplexVector apply_factor(const Eigen::MatrixXd& g, const ComplexVector& v) {
  const Eigen::VectorXd re = g.transpose() * (g * v.real());
  const Eigen::VectorXd im = g.transpose() * (g * v.imag());
  ComplexVector out(v.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

std::string_view to_string(EvalStrategy strategy) {
  return strategy == EvalStrategy::ClosedForm ? "closed-form" : "quadrature";
}

MeasurementModel::MeasurementModel(double delta_x, int dim, EvalStrategy strategy)
    : delta_x_(delta_x), dim_(dim), strategy_(strategy) {
  if (!(delta_x > 0.0) || !std::isfinite(delta_x)) {
    fail(ErrorKind::InvalidParameter, "measurement resolution must be positive and finite");
  }
  if (dim < 2) fail(ErrorKind::InvalidDimension, "truncation dimension must be >= 2");
  if (dim > kMaxWavefunctionIndex) {
    fail(ErrorKind::InvalidDimension, "truncation dimension exceeds wavefunction support");
  }

  if (strategy_ == EvalStrategy::ClosedForm) {
    // Products psi_n psi_m carry polynomials of degree <= 2 dim - 2; an order
    // K rule is exact up to degree 2K - 1.
    gh_order_ = dim + 2;
    rule_ = gauss_hermite_rule(gh_order_);
    return;
  }

  const double half_width = 0.5 * std::sqrt(2.0 * dim + 1.0) + kPositionMargin;
  const int count = static_cast<int>(std::ceil(2.0 * half_width / kPositionStep)) + 1;
  position_step_ = 2.0 * half_width / (count - 1);
  positions_.resize(count);
  position_table_.resize(count, dim);
  for (int j = 0; j < count; ++j) {
    positions_[j] = -half_width + position_step_ * j;
    const auto psi = oscillator_wavefunctions(dim, positions_[j]);
    for (int n = 0; n < dim; ++n) position_table_(j, n) = psi[n];
  }
}

Eigen::MatrixXd MeasurementModel::kernel_factor(double x_m, double sigma, double prefactor) const {
  require_finite(x_m);
  const double beta = 1.0 / (4.0 * sigma * sigma);

  if (strategy_ == EvalStrategy::ClosedForm) {
    // psi_n psi_m exp(-beta (x - x_m)^2) = h_n h_m exp(-alpha (x - mu)^2 + c)
    const double alpha = 2.0 + beta;
    const double mu = beta * x_m / alpha;
    const double shift = -2.0 * beta * x_m * x_m / alpha;
    const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    Eigen::MatrixXd g(gh_order_, dim_);
    std::vector<double> h;
    for (int k = 0; k < gh_order_; ++k) {
      const double x = mu + rule_.nodes[k] * inv_sqrt_alpha;
      const double root_w =
          std::sqrt(prefactor * rule_.weights[k] * inv_sqrt_alpha) * std::exp(0.5 * shift);
      oscillator_polynomials(dim_, x, h);
      for (int n = 0; n < dim_; ++n) g(k, n) = root_w * h[n];
    }
    return g;
  }

  const int count = static_cast<int>(positions_.size());
  Eigen::VectorXd root_w(count);
  for (int j = 0; j < count; ++j) {
    const double d = positions_[j] - x_m;
    const double end = (j == 0 || j == count - 1) ? 0.5 : 1.0;
    root_w(j) = std::sqrt(prefactor * end * position_step_) * std::exp(-0.5 * beta * d * d);
  }
  return root_w.asDiagonal() * position_table_;
}

FockOperator MeasurementModel::operator_at(double x_m) const {
  const double pref = std::pow(2.0 * kPi * delta_x_ * delta_x_, -0.25);
  const Eigen::MatrixXd g = kernel_factor(x_m, delta_x_, pref);
  return FockOperator((g.transpose() * g).cast<Complex>());
}

FockOperator MeasurementModel::squared_operator_at(double x_m) const {
  const double pref = 1.0 / std::sqrt(2.0 * kPi * delta_x_ * delta_x_);
  const Eigen::MatrixXd g = kernel_factor(x_m, delta_x_ / std::sqrt(2.0), pref);
  return FockOperator((g.transpose() * g).cast<Complex>());
}

ComplexVector MeasurementModel::apply(double x_m, const FockState& state) const {
  require_match(state, *this);
  const double pref = std::pow(2.0 * kPi * delta_x_ * delta_x_, -0.25);
  return apply_factor(kernel_factor(x_m, delta_x_, pref), state.amplitudes());
}

double MeasurementModel::squared_expectation(double x_m, const FockState& state) const {
  require_match(state, *this);
  const double pref = 1.0 / std::sqrt(2.0 * kPi * delta_x_ * delta_x_);
  const Eigen::MatrixXd g = kernel_factor(x_m, delta_x_ / std::sqrt(2.0), pref);
  const ComplexVector& v = state.amplitudes();
  return (g * v.real()).squaredNorm() + (g * v.imag()).squaredNorm();
}

double outcome_density(const FockState& state, const MeasurementModel& model, double x_m) {
  return model.squared_expectation(x_m, state);
}

FockState conditional_state(const FockState& state, const MeasurementModel& model, double x_m) {
  const double density = outcome_density(state, model, x_m);
  ComplexVector v = model.apply(x_m, state);
  const double represented = v.squaredNorm();
  if (!(density > kConditioningFloor) || !(represented > kConditioningFloor)) {
    fail(ErrorKind::DegenerateConditioning,
         "outcome x_m = " + std::to_string(x_m) + " has negligible probability density");
  }
  return FockState(v / std::sqrt(represented));
}

double joint_photon_density(const FockState& state, const MeasurementModel& model, double x_m,
                            int n) {
  if (n < 0 || n >= model.dim()) {
    fail(ErrorKind::OutOfRange, "photon number " + std::to_string(n) +
                                    " outside truncation " + std::to_string(model.dim()));
  }
  return std::norm(model.apply(x_m, state)(n));
}

double asymptotic_p1(double delta_x, double x_m) {
  if (!(delta_x > 0.0) || !std::isfinite(delta_x)) {
    fail(ErrorKind::InvalidParameter, "measurement resolution must be positive and finite");
  }
  const double dx2 = delta_x * delta_x;
  const double four_dx2 = 4.0 * dx2;
  return (x_m * x_m / (four_dx2 * four_dx2)) * std::exp(-x_m * x_m / (2.0 * dx2)) /
         std::sqrt(2.0 * kPi * dx2);
}

double OutcomeDensityTable::total_probability() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < density.size(); ++k) sum += grid.weights[k] * density[k];
  return sum;
}

OutcomeDensityTable outcome_density_table(const FockState& state, const MeasurementModel& model,
                                          const QuadratureGrid& grid, std::optional<int> n_max) {
  require_match(state, model);
  const int top = std::min(n_max.value_or(kDefaultPhotonTableMax), model.dim() - 1);
  if (top < 0) fail(ErrorKind::InvalidParameter, "n_max must be >= 0");

  OutcomeDensityTable table;
  table.grid = grid;
  table.density.resize(grid.size());
  table.per_photon.assign(top + 1, std::vector<double>(grid.size(), 0.0));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x_m = grid.nodes[k];
    table.density[k] = outcome_density(state, model, x_m);
    const ComplexVector v = model.apply(x_m, state);
    for (int n = 0; n <= top; ++n) table.per_photon[n][k] = std::norm(v(n));
  }
  return table;
}

double completeness_span(const MeasurementModel& model) {
  return 6.0 * std::sqrt(model.delta_x() * model.delta_x() + model.dim());
}

Eigen::MatrixXd completeness_residual(const MeasurementModel& model, const QuadratureGrid& grid,
                                      CompletenessForm form) {
  const double needed = completeness_span(model);
  if (grid.span() < needed) {
    fail(ErrorKind::GridTooNarrow, "grid half-width " + std::to_string(grid.span()) +
                                       " is below the required " + std::to_string(needed) +
                                       " (6*sqrt(dx^2 + dim)); pass a wider grid span");
  }
  const int dim = model.dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (form == CompletenessForm::DirectSquare) {
      sum += grid.weights[k] * model.squared_operator_at(grid.nodes[k]).entries().real();
    } else {
      const Eigen::MatrixXd p = model.operator_at(grid.nodes[k]).entries().real();
      sum += grid.weights[k] * (p * p);
    }
  }
  sum -= Eigen::MatrixXd::Identity(dim, dim);
  return sum;
}

double completeness_defect(const MeasurementModel& model, const QuadratureGrid& grid) {
  const Eigen::MatrixXd r = completeness_residual(model, grid);
  const int trusted = trusted_size(model.dim());
  return r.topLeftCorner(trusted, trusted).cwiseAbs().maxCoeff();
}

}  // namespace bae
