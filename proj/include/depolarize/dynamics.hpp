#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "depolarize/error.hpp"
#include "depolarize/graph.hpp"
#include "depolarize/isoperimetric.hpp"

namespace depolarize {

/// Opinion vector indexed by vertex. Innate opinions are expected in [0, 1];
/// expressed and adversarial opinions may be any reals.
using Opinions = Eigen::VectorXd;

inline Opinions mean_center(const Opinions& x) { return x.array() - x.mean(); }

inline void check_dimensions(const Graph& g, const Opinions& s, const char* where) {
  if (static_cast<std::size_t>(s.size()) != g.n())
    throw DimensionError(std::string(where) + ": opinion vector has " + std::to_string(s.size()) +
                         " entries but graph has " + std::to_string(g.n()) + " vertices");
}

/// Cholesky factorization of I + L for one graph version.
///
/// I + L has every eigenvalue at least 1, so the factorization always exists;
/// solves are refined once more whenever the relative residual exceeds 1e-10.
class EquilibriumSolver {
 public:
  static constexpr double kResidualTarget = 1e-10;

  explicit EquilibriumSolver(const Graph& g) : system_(laplacian(g)), version_(g.version()) {
    system_.diagonal().array() += 1.0;
    factor_.compute(system_);
    if (factor_.info() != Eigen::Success) throw NumericError("EquilibriumSolver: factorization of I + L failed");
  }

  std::size_t n() const { return static_cast<std::size_t>(system_.rows()); }
  std::uint64_t graph_version() const { return version_; }
  const Eigen::MatrixXd& system() const { return system_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != system_.rows()) throw DimensionError("EquilibriumSolver: right-hand side has wrong length");
    Eigen::VectorXd x = factor_.solve(rhs);
    const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd residual = rhs - system_ * x;
      if (residual.norm() <= kResidualTarget * scale) return x;
      x += factor_.solve(residual);
    }
    if ((rhs - system_ * x).norm() > kResidualTarget * scale)
      throw NumericError("EquilibriumSolver: residual above target after refinement");
    return x;
  }

 private:
  Eigen::MatrixXd system_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  std::uint64_t version_;
};

/// Expressed opinions z = (I + L)^{-1} s.
inline Opinions equilibrium_opinions(const Graph& g, const Opinions& s) {
  check_dimensions(g, s, "equilibrium_opinions");
  return EquilibriumSolver(g).solve(s);
}

struct IterationResult {
  Opinions opinions;
  std::size_t steps = 0;
  bool converged = false;
};

/// Runs the synchronous averaging update until the largest per-vertex change
/// drops below tol or max_steps updates have been applied.
inline IterationResult iterate_opinions(const Graph& g, const Opinions& s, std::size_t max_steps, double tol) {
  check_dimensions(g, s, "iterate_opinions");
  if (!(tol > 0.0)) throw std::invalid_argument("iterate_opinions: tol must be positive");
  const auto n = g.n();
  const Eigen::MatrixXd& w = g.weights();
  IterationResult result{s, 0, false};
  Opinions next(static_cast<Eigen::Index>(n));
  while (result.steps < max_steps) {
    double change = 0.0;
    for (Vertex i = 0; i < n; ++i) {
      double acc = s(i);
      for (Vertex j : g.neighbors(i)) acc += w(i, j) * result.opinions(j);
      next(i) = acc / (1.0 + g.degree(i));
      change = std::max(change, std::abs(next(i) - result.opinions(i)));
    }
    result.opinions.swap(next);
    ++result.steps;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// Squared norm of the mean-centered opinions.
inline double polarization(const Opinions& x) {
  if (x.size() == 0) throw std::invalid_argument("polarization: empty opinion vector");
  return mean_center(x).squaredNorm();
}

inline double disagreement(const Opinions& x, Vertex i, Vertex j) {
  const auto n = static_cast<Vertex>(x.size());
  if (i >= n || j >= n) throw std::out_of_range("disagreement: vertex out of range");
  const double diff = x(i) - x(j);
  return diff * diff;
}

/// Two-sided estimate of expressed polarization from degrees and the Cheeger
/// constant. The upper bound is only guaranteed when h came from exact mode;
/// with a sweep estimate it is flagged as heuristic.
struct ContractionBounds {
  double lower = 0.0;
  double upper = 0.0;
  double isoperimetric = 0.0;
  CheegerMode h_mode = CheegerMode::exact;
  bool upper_is_heuristic = false;
};

inline ContractionBounds polarization_bounds(const Graph& g, const Opinions& s, CheegerMode h_mode) {
  check_dimensions(g, s, "polarization_bounds");
  if (g.n() < 2) throw std::invalid_argument("polarization_bounds: needs at least 2 vertices");
  const double innate = polarization(s);
  const double d_max = g.degrees().maxCoeff();
  const double d_min = g.degrees().minCoeff();
  const double h = isoperimetric_number(g, h_mode);
  const double top = std::min(2.0 * d_max, g.w_max() * static_cast<double>(g.n()));
  ContractionBounds b;
  b.lower = innate / ((1.0 + top) * (1.0 + top));
  const double gap_floor = 1.0 + 0.5 * d_min * h * h;
  b.upper = innate / (gap_floor * gap_floor);
  b.isoperimetric = h;
  b.h_mode = h_mode;
  b.upper_is_heuristic = h_mode == CheegerMode::sweep;
  return b;
}

/// Polarization on the saturated complete graph: P(s) / (1 + w_max n)^2.
inline double complete_graph_floor(const Opinions& s, double w_max) {
  if (s.size() == 0) throw std::invalid_argument("complete_graph_floor: empty opinion vector");
  const double denom = 1.0 + w_max * static_cast<double>(s.size());
  return polarization(s) / (denom * denom);
}

/// Edge-weighted Pearson correlation of endpoint opinions, each undirected
/// edge counted once in each orientation. Empty when the graph has no edges or
/// endpoint values have zero variance.
inline std::optional<double> opinion_assortativity(const Graph& g, const Opinions& s) {
  check_dimensions(g, s, "opinion_assortativity");
  const Eigen::VectorXd& d = g.degrees();
  const double total = d.sum();
  if (!(total > 0.0)) return std::nullopt;
  const double mean = d.dot(s) / total;
  const Eigen::VectorXd c = s.array() - mean;
  const double var = d.dot(c.cwiseProduct(c)) / total;
  const double scale = d.dot(s.cwiseProduct(s)) / total;
  if (!(var > 1e-15 * std::max(scale, std::numeric_limits<double>::min()))) return std::nullopt;
  double cov = 0.0;
  for (Vertex i = 0; i < g.n(); ++i)
    for (Vertex j : g.neighbors(i)) cov += g.weights()(i, j) * c(i) * c(j);
  cov /= total;
  return std::clamp(cov / var, -1.0, 1.0);
}

}  // namespace depolarize
