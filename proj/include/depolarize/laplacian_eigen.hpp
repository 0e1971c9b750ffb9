#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "depolarize/graph.hpp"

namespace depolarize {

/// Second and third smallest Laplacian eigenvalues with a unit Fiedler vector.
struct LowSpectrum {
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda_max = 0.0;
  Eigen::VectorXd fiedler;
  double gap_beta = 0.0;  ///< lambda3 - lambda2; zero when lambda2 is repeated
};

namespace detail {

// Eigenvalues closer than this (relative to the spectral radius) are treated
// as one repeated eigenvalue.
inline double eigen_tolerance(double lambda_max) { return 1e-10 * std::max(1.0, lambda_max); }

// Flip so the first entry that is clearly nonzero is positive.
inline void canonical_sign(Eigen::VectorXd& v) {
  const double threshold = 1e-10 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > threshold) {
      if (v(k) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace detail

/// All Laplacian eigenvalues in ascending order.
inline Eigen::VectorXd laplacian_eigenvalues(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(g), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("laplacian_eigenvalues: eigensolver did not converge");
  return solver.eigenvalues();
}

inline double spectral_gap(const Graph& g) {
  if (g.n() < 2) return 0.0;
  return std::max(0.0, laplacian_eigenvalues(g)(1));
}

/// Low end of the Laplacian spectrum from a dense symmetric eigendecomposition.
///
/// When the kernel has dimension two or more (a disconnected graph) the solver
/// may return any basis of it, so the Fiedler vector is taken from that basis
/// after projecting out the constant vector. The sign is fixed so the first
/// clearly nonzero entry is positive.
inline LowSpectrum low_spectrum(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  if (n < 3) throw std::invalid_argument("low_spectrum: needs at least 3 vertices");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(g));
  if (solver.info() != Eigen::Success) throw NumericError("low_spectrum: eigensolver did not converge");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  LowSpectrum out;
  out.lambda_max = values(n - 1);
  const double tol = detail::eigen_tolerance(out.lambda_max);
  out.lambda2 = std::max(0.0, values(1));
  out.lambda3 = std::max(out.lambda2, values(2));
  out.gap_beta = out.lambda3 - out.lambda2;
  if (out.gap_beta <= tol) out.gap_beta = 0.0;

  Eigen::Index kernel_dim = 0;
  while (kernel_dim < n && values(kernel_dim) <= tol) ++kernel_dim;

  if (kernel_dim >= 2) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd best;
    double best_norm = -1.0;
    for (Eigen::Index k = 0; k < kernel_dim; ++k) {
      Eigen::VectorXd c = vectors.col(k) - vectors.col(k).dot(ones) * ones;
      const double norm = c.norm();
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best = std::move(c);
      }
    }
    out.fiedler = best / best_norm;
    out.lambda2 = 0.0;
  } else {
    out.fiedler = vectors.col(1);
    // Re-orthogonalize against the constant vector to remove solver drift.
    out.fiedler.array() -= out.fiedler.mean();
    out.fiedler.normalize();
  }
  detail::canonical_sign(out.fiedler);
  return out;
}

}  // namespace depolarize
