#pragma once

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "depolarize/dynamics.hpp"
#include "depolarize/graph.hpp"
#include "depolarize/laplacian_eigen.hpp"
#include "depolarize/spectral.hpp"

namespace depolarize {

/// Adds delta to the weight of pair (i, j).
struct EdgePerturbation {
  Vertex i = 0;
  Vertex j = 0;
  double delta = 0.0;
};

inline void validate(const Graph& g, const EdgePerturbation& p) {
  detail::check_addition(g, p.i, p.j, p.delta, "EdgePerturbation");
}

/// Copy of g with w_ij raised by delta. A result within the saturation
/// tolerance of the cap is snapped to the cap exactly.
inline Graph add_weight(const Graph& g, const EdgePerturbation& p) {
  validate(g, p);
  Graph out = g;
  double w = g.weights()(p.i, p.j) + p.delta;
  if (w > g.w_max() - kSaturationTolerance) w = g.w_max();
  out.set_weight(p.i, p.j, w);
  return out;
}

/// Bounds on the exact polarization drop P(z) - P(z+).
struct DeltaBounds {
  double upper = 0.0;
  std::optional<double> lower;    ///< present only when epsilon > 0
  std::optional<double> epsilon;  ///< margin of the lower-bound hypothesis
};

/// Single-edge perturbation analysis for one graph and one innate profile.
///
/// Holds the Cholesky factor of I + L together with z = (I+L)^{-1} s and
/// y = (I+L)^{-1} z~. The gradient of polarization along pair (i, j) is then
///
///     dP/dw_ij = -2 (z_i - z_j) (y_i - y_j),
///
/// an O(1) lookup, and the exact effect of adding delta costs one extra solve
/// for u = (I+L)^{-1} v_ij (v_ij = e_i - e_j):
///
///     P(z) - P(z+) = -delta dP / (1 + delta a) - delta^2 b (z_i - z_j)^2 / (1 + delta a)^2,
///
/// with a = v_ij^T u and b = u^T u.
///
/// The graph is held by reference and must outlive the analysis and stay
/// unmodified. All queries are const and safe to call concurrently; the
/// extreme eigenvalues used by delta_bounds() are computed once on first use.
class PerturbationAnalysis {
 public:
  PerturbationAnalysis(const Graph& g, const Opinions& s) : graph_(g), solver_(g) {
    check_dimensions(g, s, "PerturbationAnalysis");
    z_ = solver_.solve(s);
    z_centered_ = mean_center(z_);
    y_ = solver_.solve(z_centered_);
    polarization_ = z_centered_.squaredNorm();
  }

  PerturbationAnalysis(const PerturbationAnalysis&) = delete;
  PerturbationAnalysis& operator=(const PerturbationAnalysis&) = delete;

  const Graph& graph() const { return graph_; }
  const EquilibriumSolver& solver() const { return solver_; }
  const Opinions& expressed() const { return z_; }
  double polarization() const { return polarization_; }

  double derivative(Vertex i, Vertex j) const {
    check_pair(i, j);
    return -2.0 * (z_(i) - z_(j)) * (y_(i) - y_(j));
  }

  struct RankOneTerms {
    double a = 0.0;  ///< v^T (I+L)^{-1} v
    double b = 0.0;  ///< v^T (I+L)^{-2} v
  };

  RankOneTerms rank_one_terms(Vertex i, Vertex j) const {
    check_pair(i, j);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(z_.size());
    v(i) = 1.0;
    v(j) = -1.0;
    const Eigen::VectorXd u = solver_.solve(v);
    return {u(i) - u(j), u.squaredNorm()};
  }

  double delta_exact(const EdgePerturbation& p) const {
    validate(graph_, p);
    const auto [a, b] = rank_one_terms(p.i, p.j);
    const double dz = z_(p.i) - z_(p.j);
    const double denom = 1.0 + p.delta * a;
    return -p.delta * derivative(p.i, p.j) / denom - p.delta * p.delta * b * dz * dz / (denom * denom);
  }

  /// True iff adding p.delta strictly reduces polarization.
  bool reduction_condition(const EdgePerturbation& p) const {
    validate(graph_, p);
    const auto [a, b] = rank_one_terms(p.i, p.j);
    const double dz = z_(p.i) - z_(p.j);
    return -derivative(p.i, p.j) > dz * dz * b / (1.0 / p.delta + a);
  }

  /// Closed form for pairs whose other neighbors and weights coincide. Then
  /// v_ij is an eigenvector of L with eigenvalue mu = d_i + w_ij, and the
  /// drop is (z_i - z_j)^2 2 delta (1 + delta + mu) / (1 + 2 delta + mu)^2.
  double twin_delta(const EdgePerturbation& p) const {
    validate(graph_, p);
    const Eigen::MatrixXd& w = graph_.weights();
    for (Vertex k = 0; k < graph_.n(); ++k) {
      if (k == p.i || k == p.j) continue;
      if (std::abs(w(p.i, k) - w(p.j, k)) > kSaturationTolerance)
        throw std::domain_error("twin_edge_delta: vertices do not share identical neighborhoods");
    }
    const double dz = z_(p.i) - z_(p.j);
    const double mu = graph_.degree(p.i) + w(p.i, p.j);
    const double denom = 1.0 + 2.0 * p.delta + mu;
    return dz * dz * 2.0 * p.delta * (1.0 + p.delta + mu) / (denom * denom);
  }

  DeltaBounds delta_bounds(const EdgePerturbation& p) const {
    validate(graph_, p);
    const auto [lambda2, lambda_max] = extremes();
    DeltaBounds out;
    out.upper = (1.0 + lambda_max) / (1.0 + 2.0 * p.delta + lambda_max) * (-p.delta * derivative(p.i, p.j));
    const double dz = z_(p.i) - z_(p.j);
    if (std::abs(dz) <= 1e-15 * std::max(1.0, z_.cwiseAbs().maxCoeff())) return out;
    const double ratio = (y_(p.i) - y_(p.j)) / dz;
    const double eps = ratio - p.delta / (2.0 * p.delta + (1.0 + lambda2) * (1.0 + lambda2));
    if (eps > 0.0) {
      out.epsilon = eps;
      out.lower = 2.0 * p.delta * eps * dz * dz / (1.0 + 2.0 * p.delta);
    }
    return out;
  }

  /// (lambda2, lambda_n) of the Laplacian.
  std::pair<double, double> extremes() const {
    std::call_once(extremes_once_, [this] {
      const Eigen::VectorXd values = laplacian_eigenvalues(graph_);
      extremes_ = {graph_.n() > 1 ? std::max(0.0, values(1)) : 0.0, values(values.size() - 1)};
    });
    return extremes_;
  }

 private:
  void check_pair(Vertex i, Vertex j) const {
    if (i >= graph_.n() || j >= graph_.n()) throw std::out_of_range("PerturbationAnalysis: vertex out of range");
    if (i == j) throw std::invalid_argument("PerturbationAnalysis: endpoints must differ");
  }

  const Graph& graph_;
  EquilibriumSolver solver_;
  Opinions z_;
  Opinions z_centered_;
  Eigen::VectorXd y_;
  double polarization_ = 0.0;
  mutable std::once_flag extremes_once_;
  mutable std::pair<double, double> extremes_{0.0, 0.0};
};

/// P(z) - P(z+) for one perturbation; positive means polarization fell.
inline double polarization_delta_exact(const Graph& g, const Opinions& s, const EdgePerturbation& p) {
  return PerturbationAnalysis(g, s).delta_exact(p);
}

inline double polarization_derivative(const Graph& g, const Opinions& s, Vertex i, Vertex j) {
  return PerturbationAnalysis(g, s).derivative(i, j);
}

inline bool reduction_condition(const Graph& g, const Opinions& s, const EdgePerturbation& p) {
  return PerturbationAnalysis(g, s).reduction_condition(p);
}

inline double twin_edge_delta(const Graph& g, const Opinions& s, const EdgePerturbation& p) {
  return PerturbationAnalysis(g, s).twin_delta(p);
}

inline DeltaBounds polarization_delta_bounds(const Graph& g, const Opinions& s, const EdgePerturbation& p) {
  return PerturbationAnalysis(g, s).delta_bounds(p);
}

}  // namespace depolarize
