#pragma once

// Truncated photon-number-basis linear algebra for one optical mode.
//
// Quadrature convention used throughout the library:
//   x = (a + a^dagger) / 2,   y = (a - a^dagger) / (2i),   [x, y] = i/2,
// so the vacuum variance of either quadrature is 1/4 and x|0> = 0.5|1>.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace bae {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Highest oscillator index supported by the wavefunction recurrence.
inline constexpr int kMaxWavefunctionIndex = 1024;

/// Amplitudes over |0>, ..., |dim-1>. Not necessarily normalized; use
/// normalized() to obtain a unit vector.
class FockState {
 public:
  explicit FockState(ComplexVector amplitudes);

  static FockState basis(int n, int dim);
  static FockState vacuum(int dim) { return basis(0, dim); }

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(int n) const;

  double norm() const { return amplitudes_.norm(); }
  double squared_norm() const { return amplitudes_.squaredNorm(); }

  /// Throws degenerate-conditioning for a (numerically) zero vector.
  FockState normalized() const;

  /// |<n|psi>|^2 without renormalization.
  double probability(int n) const;

  /// Highest index with |amplitude|^2 above `threshold`, or -1 if none.
  int support_top(double threshold = 0.0) const;

  Complex inner(const FockState& other) const;

 private:
  ComplexVector amplitudes_;
};

class FockOperator {
 public:
  explicit FockOperator(ComplexMatrix entries);

  static FockOperator identity(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  FockOperator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  /// Largest |entry| of the top-left `size` x `size` block.
  double max_abs(int size = -1) const;

  FockState apply(const FockState& state) const;
  /// <psi|O|psi> for the state as given (no renormalization).
  Complex expectation(const FockState& state) const;

  FockOperator operator+(const FockOperator& rhs) const;
  FockOperator operator-(const FockOperator& rhs) const;
  FockOperator operator*(const FockOperator& rhs) const;
  FockOperator operator*(Complex scale) const;

 private:
  ComplexMatrix entries_;
};

FockOperator commutator(const FockOperator& lhs, const FockOperator& rhs);

/// Trace distance sqrt(1 - |<a|b>|^2) between the pure states a/|a| and
/// b/|b|, evaluated from |a - e^{i phi} b| so it stays accurate near zero.
double trace_distance(const FockState& a, const FockState& b);

FockOperator annihilation(int dim);
FockOperator creation(int dim);
FockOperator quadrature_x(int dim);
FockOperator quadrature_y(int dim);
FockOperator number_operator(int dim);

/// Size of the lower block on which truncated ladder identities are trusted:
/// the top quarter of the levels is excluded.
int trusted_size(int dim);

/// psi_n(x) in the position representation matching quadrature_x, i.e.
/// psi_0(x) = (2/pi)^(1/4) exp(-x^2). Throws out-of-range for n outside
/// [0, kMaxWavefunctionIndex].
double oscillator_wavefunction(int n, double x);

/// psi_0(x), ..., psi_{count-1}(x) from one pass of the normalized
/// three-term recurrence. Stays finite for large |x| by carrying the Gaussian
/// factor in log space.
std::vector<double> oscillator_wavefunctions(int count, double x);

/// Polynomial parts h_n(x) = psi_n(x) exp(x^2), written into `out`
/// (resized to `count`).
void oscillator_polynomials(int count, double x, std::vector<double>& out);

}  // namespace bae
