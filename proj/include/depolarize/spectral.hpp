#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "depolarize/graph.hpp"
#include "depolarize/isoperimetric.hpp"
#include "depolarize/laplacian_eigen.hpp"

namespace depolarize {

struct BoundInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x, double slack = 0.0) const { return x >= lower - slack && x <= upper + slack; }
};

/// Adversary's best polarization over innate opinions with squared norm at
/// most R: R / (1 + lambda2)^2, attained along the Fiedler vector.
inline double worst_case_polarization(double lambda2, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("worst_case_polarization: radius must be positive");
  if (!(lambda2 >= 0.0)) throw std::invalid_argument("worst_case_polarization: lambda2 must be non-negative");
  const double denom = 1.0 + lambda2;
  return radius / (denom * denom);
}

namespace detail {

inline void check_addition(const Graph& g, Vertex i, Vertex j, double delta, const char* where) {
  if (i >= g.n() || j >= g.n()) throw std::out_of_range(std::string(where) + ": vertex out of range");
  if (i == j) throw std::invalid_argument(std::string(where) + ": endpoints must differ");
  const double headroom = g.w_max() - g.weights()(i, j);
  if (headroom <= kSaturationTolerance) throw std::invalid_argument(std::string(where) + ": pair is saturated");
  if (!(delta > 0.0)) throw std::invalid_argument(std::string(where) + ": delta must be positive");
  if (delta > headroom + kSaturationTolerance)
    throw std::invalid_argument(std::string(where) + ": delta exceeds remaining headroom");
}

// max(1 - 2 delta / beta, 0); a repeated lambda2 (beta == 0) gives 0.
inline double gap_shrink(double delta, double beta) { return beta > 0.0 ? std::max(1.0 - 2.0 * delta / beta, 0.0) : 0.0; }

}  // namespace detail

/// Interval for lambda2(L+) - lambda2(L) after adding delta to pair (i, j):
/// [max(1 - 2 delta / beta, 0) delta alpha^2, delta alpha^2], alpha = |v_i - v_j|.
inline BoundInterval gap_bounds_after_addition(const Graph& g, const LowSpectrum& spectrum, Vertex i, Vertex j,
                                               double delta) {
  detail::check_addition(g, i, j, delta, "gap_bounds_after_addition");
  const double alpha = spectrum.fiedler(i) - spectrum.fiedler(j);
  const double upper = delta * alpha * alpha;
  return {detail::gap_shrink(delta, spectrum.gap_beta) * upper, upper};
}

inline BoundInterval gap_bounds_after_addition(const Graph& g, Vertex i, Vertex j, double delta) {
  detail::check_addition(g, i, j, delta, "gap_bounds_after_addition");
  return gap_bounds_after_addition(g, low_spectrum(g), i, j, delta);
}

/// Interval for the drop in worst-case polarization R/(1+lambda2)^2 after
/// adding delta to pair (i, j).
inline BoundInterval worst_case_reduction_bounds(const Graph& g, const LowSpectrum& spectrum, Vertex i, Vertex j,
                                                 double delta, double radius) {
  detail::check_addition(g, i, j, delta, "worst_case_reduction_bounds");
  if (!(radius > 0.0)) throw std::invalid_argument("worst_case_reduction_bounds: radius must be positive");
  const double alpha = spectrum.fiedler(i) - spectrum.fiedler(j);
  const double alpha2 = alpha * alpha;
  const double l2 = spectrum.lambda2;
  const double c = detail::gap_shrink(delta, spectrum.gap_beta);
  const double lower = 2.0 * radius * delta * c * alpha2 / std::pow(1.0 + 2.0 * delta + l2, 3);
  const double upper = 4.0 * radius * std::max(delta, delta * delta) * alpha2 / std::pow(1.0 + l2, 3);
  return {lower, upper};
}

inline BoundInterval worst_case_reduction_bounds(const Graph& g, Vertex i, Vertex j, double delta, double radius) {
  detail::check_addition(g, i, j, delta, "worst_case_reduction_bounds");
  return worst_case_reduction_bounds(g, low_spectrum(g), i, j, delta, radius);
}

/// Degree and Cheeger bounds on the extreme Laplacian eigenvalues:
/// d_min h^2 / 2 <= lambda2 <= 2 d_max h and lambda_n <= min(2 d_max, w_max n).
struct LaplacianExtremeBounds {
  double gap_lower = 0.0;
  double gap_upper = 0.0;
  double top_upper = 0.0;
  double isoperimetric = 0.0;
};

inline LaplacianExtremeBounds laplacian_extreme_bounds(const Graph& g, CheegerMode h_mode) {
  if (g.n() < 2) throw std::invalid_argument("laplacian_extreme_bounds: needs at least 2 vertices");
  const double h = isoperimetric_number(g, h_mode);
  const double d_min = g.degrees().minCoeff();
  const double d_max = g.degrees().maxCoeff();
  return {0.5 * d_min * h * h, 2.0 * d_max * h, std::min(2.0 * d_max, g.w_max() * static_cast<double>(g.n())), h};
}

}  // namespace depolarize
