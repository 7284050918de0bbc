#include "bae/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bae/error.hpp"

namespace bae {
namespace {

void require_dim(int dim) {
  if (dim < 2) {
    fail(ErrorKind::InvalidDimension,
         "truncation dimension must be >= 2, got " + std::to_string(dim));
  }
}

void require_same_dim(int lhs, int rhs) {
  if (lhs != rhs) {
    fail(ErrorKind::DimensionMismatch,
         "operand dimensions differ: " + std::to_string(lhs) + " vs " +
             std::to_string(rhs));
  }
}

// (2/pi)^(1/4)
const double kGroundNorm = std::pow(2.0 / std::numbers::pi, 0.25);

}  // namespace

// ---------------------------------------------------------------------------
// FockState

FockState::FockState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  require_dim(static_cast<int>(amplitudes_.size()));
}

FockState FockState::basis(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) {
    fail(ErrorKind::OutOfRange, "basis index " + std::to_string(n) +
                                    " outside truncation " + std::to_string(dim));
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(n) = 1.0;
  return FockState(std::move(v));
}

Complex FockState::amplitude(int n) const {
  if (n < 0 || n >= dim()) {
    fail(ErrorKind::OutOfRange, "photon number " + std::to_string(n) +
                                    " outside truncation " + std::to_string(dim()));
  }
  return amplitudes_(n);
}

FockState FockState::normalized() const {
  const double nrm = amplitudes_.norm();
  if (!(nrm > 1e-150) || !std::isfinite(nrm)) {
    fail(ErrorKind::DegenerateConditioning, "cannot normalize a zero or non-finite state");
  }
  return FockState(amplitudes_ / nrm);
}

double FockState::probability(int n) const { return std::norm(amplitude(n)); }

int FockState::support_top(double threshold) const {
  for (int n = dim() - 1; n >= 0; --n) {
    if (std::norm(amplitudes_(n)) > threshold) return n;
  }
  return -1;
}

Complex FockState::inner(const FockState& other) const {
  require_same_dim(dim(), other.dim());
  return amplitudes_.dot(other.amplitudes_);
}

// ---------------------------------------------------------------------------
// FockOperator

FockOperator::FockOperator(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    fail(ErrorKind::DimensionMismatch, "operator matrix must be square");
  }
  require_dim(static_cast<int>(entries_.rows()));
}

FockOperator FockOperator::identity(int dim) {
  require_dim(dim);
  return FockOperator(ComplexMatrix::Identity(dim, dim));
}

FockOperator FockOperator::adjoint() const { return FockOperator(entries_.adjoint()); }

bool FockOperator::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double FockOperator::max_abs(int size) const {
  const int s = (size < 0 || size > dim()) ? dim() : size;
  if (s == 0) return 0.0;
  return entries_.topLeftCorner(s, s).cwiseAbs().maxCoeff();
}

FockState FockOperator::apply(const FockState& state) const {
  require_same_dim(dim(), state.dim());
  return FockState(entries_ * state.amplitudes());
}

Complex FockOperator::expectation(const FockState& state) const {
  require_same_dim(dim(), state.dim());
  return state.amplitudes().dot(entries_ * state.amplitudes());
}

FockOperator FockOperator::operator+(const FockOperator& rhs) const {
  require_same_dim(dim(), rhs.dim());
  return FockOperator(entries_ + rhs.entries_);
}

FockOperator FockOperator::operator-(const FockOperator& rhs) const {
  require_same_dim(dim(), rhs.dim());
  return FockOperator(entries_ - rhs.entries_);
}

FockOperator FockOperator::operator*(const FockOperator& rhs) const {
  require_same_dim(dim(), rhs.dim());
  return FockOperator(entries_ * rhs.entries_);
}

FockOperator FockOperator::operator*(Complex scale) const {
  return FockOperator(entries_ * scale);
}

FockOperator commutator(const FockOperator& lhs, const FockOperator& rhs) {
  return lhs * rhs - rhs * lhs;
}

double trace_distance(const FockState& a, const FockState& b) {
  const FockState u = a.normalized();
  const FockState v = b.normalized();
  const Complex overlap = v.inner(u);
  const double mag = std::abs(overlap);
  const Complex phase = mag > 0.0 ? overlap / mag : Complex(1.0, 0.0);
  const double delta = (u.amplitudes() - phase * v.amplitudes()).norm();
  // |<u|v>| = 1 - delta^2 / 2
  return delta * std::sqrt(std::max(0.0, 1.0 - 0.25 * delta * delta));
}

// ---------------------------------------------------------------------------
// Mode operators

FockOperator annihilation(int dim) {
  require_dim(dim);
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return FockOperator(std::move(a));
}

FockOperator creation(int dim) { return annihilation(dim).adjoint(); }

FockOperator quadrature_x(int dim) {
  const FockOperator a = annihilation(dim);
  return (a + a.adjoint()) * Complex(0.5, 0.0);
}

FockOperator quadrature_y(int dim) {
  const FockOperator a = annihilation(dim);
  // (a - a^dagger) / (2i)
  return (a - a.adjoint()) * Complex(0.0, -0.5);
}

FockOperator number_operator(int dim) {
  require_dim(dim);
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return FockOperator(std::move(n));
}

int trusted_size(int dim) { return dim - dim / 4; }

// ---------------------------------------------------------------------------
// Position-representation wavefunctions

void oscillator_polynomials(int count, double x, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(count));
  if (count <= 0) return;
  out[0] = kGroundNorm;
  if (count > 1) out[1] = 2.0 * x * kGroundNorm;
  for (int n = 2; n < count; ++n) {
    out[n] = (2.0 * x * out[n - 1] - std::sqrt(n - 1.0) * out[n - 2]) / std::sqrt(double(n));
  }
}

std::vector<double> oscillator_wavefunctions(int count, double x) {
  if (count < 0 || count > kMaxWavefunctionIndex + 1) {
    fail(ErrorKind::OutOfRange, "wavefunction count " + std::to_string(count) +
                                    " exceeds supported maximum " +
                                    std::to_string(kMaxWavefunctionIndex + 1));
  }
  if (!std::isfinite(x)) fail(ErrorKind::InvalidParameter, "non-finite position");

  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  if (count == 0) return out;

  // psi_n = value * exp(log_scale); rescale whenever the mantissa grows.
  constexpr double kRescale = 1e150;
  const double log_rescale = std::log(kRescale);
  double log_scale = std::log(kGroundNorm) - x * x;
  double prev = 0.0;
  double cur = 1.0;
  out[0] = std::exp(log_scale);
  for (int n = 1; n < count; ++n) {
    const double next = (2.0 * x * cur - std::sqrt(n - 1.0) * prev) / std::sqrt(double(n));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += log_rescale;
    }
    out[n] = cur * std::exp(log_scale);
  }
  return out;
}

double oscillator_wavefunction(int n, double x) {
  if (n < 0 || n > kMaxWavefunctionIndex) {
    fail(ErrorKind::OutOfRange, "oscillator index " + std::to_string(n) +
                                    " outside [0, " +
                                    std::to_string(kMaxWavefunctionIndex) + "]");
  }
  return oscillator_wavefunctions(n + 1, x)[static_cast<std::size_t>(n)];
}

}  // namespace bae
