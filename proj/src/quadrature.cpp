#include "bae/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bae/error.hpp"

namespace bae {

std::string_view to_string(GridKind kind) {
  return kind == GridKind::Uniform ? "uniform" : "gauss-hermite";
}

GridKind grid_kind_from_string(std::string_view name) {
  if (name == "uniform") return GridKind::Uniform;
  if (name == "gauss-hermite") return GridKind::GaussHermite;
  fail(ErrorKind::InvalidParameter, "unknown grid kind '" + std::string(name) + "'");
}

double QuadratureGrid::span() const {
  return nodes.empty() ? 0.0 : std::max(-nodes.front(), nodes.back());
}

double QuadratureGrid::max_step() const {
  double step = 0.0;
  for (std::size_t k = 1; k < nodes.size(); ++k) step = std::max(step, nodes[k] - nodes[k - 1]);
  return step;
}

double QuadratureGrid::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(nodes[k]);
  return sum;
}

// Newton iteration on the orthonormal Hermite recurrence, with the classic
// asymptotic initial guesses for the largest roots.
GaussHermiteRule gauss_hermite_rule(int count) {
  if (count < 1) fail(ErrorKind::InvalidParameter, "Gauss-Hermite order must be >= 1");
  const int n = count;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(double(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      fail(ErrorKind::InvalidParameter,
           "Gauss-Hermite root iteration did not converge for order " + std::to_string(n));
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  // Roots were produced in descending order.
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {std::move(x), std::move(w)};
}

QuadratureGrid make_grid(GridKind kind, double span, int count) {
  if (count < 2) fail(ErrorKind::InvalidParameter, "grid count must be >= 2");
  if (!(span > 0.0) || !std::isfinite(span)) {
    fail(ErrorKind::InvalidParameter, "grid span must be positive and finite");
  }
  QuadratureGrid grid;
  grid.kind = kind;
  grid.nodes.resize(count);
  grid.weights.resize(count);
  if (kind == GridKind::Uniform) {
    const double h = 2.0 * span / (count - 1);
    for (int k = 0; k < count; ++k) {
      grid.nodes[k] = -span + h * k;
      grid.weights[k] = (k == 0 || k == count - 1) ? 0.5 * h : h;
    }
    grid.nodes[count - 1] = span;
    return grid;
  }

  if (count > kMaxGaussHermiteCount) {
    fail(ErrorKind::InvalidParameter,
         "Gauss-Hermite grids support at most " + std::to_string(kMaxGaussHermiteCount) +
             " nodes");
  }
  const GaussHermiteRule rule = gauss_hermite_rule(count);
  const double scale = span / rule.nodes.back();
  for (int k = 0; k < count; ++k) {
    const double t = rule.nodes[k];
    grid.nodes[k] = scale * t;
    grid.weights[k] = scale * rule.weights[k] * std::exp(t * t);
  }
  return grid;
}

}  // namespace bae
