#pragma once

#include <functional>
#include <string_view>
#include <vector>

namespace bae {

enum class GridKind { Uniform, GaussHermite };

std::string_view to_string(GridKind kind);
GridKind grid_kind_from_string(std::string_view name);

/// Nodes strictly increasing, weights strictly positive.
///
/// Uniform: `count` equally spaced nodes on [-span, span] with trapezoid
/// weights; the weights sum to 2*span.
/// GaussHermite: the Gauss-Hermite rule rescaled so that its outermost node
/// sits at +/-span, with the Gaussian weight folded back into the weights so
/// that sum_k w_k f(x_k) approximates the plain integral of f. The weights
/// then sum to the rule's estimate of the integral of 1 over its effective
/// support, roughly 2*span.
struct QuadratureGrid {
  GridKind kind = GridKind::Uniform;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double span() const;
  /// Largest gap between adjacent nodes.
  double max_step() const;
  double integrate(const std::function<double(double)>& f) const;
};

QuadratureGrid make_grid(GridKind kind, double span, int count);

/// Largest Gauss-Hermite order accepted by make_grid (the folded-back weights
/// w_k exp(t_k^2) overflow beyond this).
inline constexpr int kMaxGaussHermiteCount = 256;

/// Physicists' Gauss-Hermite rule: sum_k w_k f(t_k) ~ int f(t) exp(-t^2) dt,
/// exact for polynomials of degree < 2*count. Nodes ascending.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite_rule(int count);

}  // namespace bae
