#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "depolarize/error.hpp"

namespace depolarize {

using Vertex = std::size_t;

/// Weights within this distance of the cap count as saturated.
inline constexpr double kSaturationTolerance = 1e-12;

/// Largest graph accepted by the dense representation.
inline constexpr std::size_t kMaxVertices = 4096;

/// Weighted undirected graph without self-loops.
///
/// Weights live in a dense symmetric matrix with entries in [0, w_max]; a pair
/// is an edge exactly when its weight is positive. Sorted neighbor lists and
/// weighted degrees are kept alongside and refreshed on every mutation, and
/// each mutation bumps version() so derived caches can detect staleness.
class Graph {
 public:
  explicit Graph(std::size_t n, double w_max = 1.0)
      : w_max_(w_max), weights_(Eigen::MatrixXd::Zero(n, n)), adjacency_(n), degrees_(Eigen::VectorXd::Zero(n)) {
    if (n == 0) throw std::invalid_argument("Graph: vertex count must be positive");
    if (n > kMaxVertices) throw std::length_error("Graph: vertex count exceeds " + std::to_string(kMaxVertices));
    if (!(w_max > 0.0) || !std::isfinite(w_max)) throw std::invalid_argument("Graph: w_max must be a positive finite real");
  }

  /// Builds a graph from a full weight matrix, validating every invariant.
  static Graph from_weights(const Eigen::MatrixXd& weights, double w_max = 1.0) {
    if (weights.rows() != weights.cols()) throw DimensionError("Graph: weight matrix must be square");
    Graph g(static_cast<std::size_t>(weights.rows()), w_max);
    const auto n = g.n();
    for (Vertex i = 0; i < n; ++i) {
      if (weights(i, i) != 0.0) throw std::invalid_argument("Graph: self-loops are not allowed");
      for (Vertex j = i + 1; j < n; ++j) {
        if (weights(i, j) != weights(j, i)) throw std::invalid_argument("Graph: weight matrix must be symmetric");
        if (weights(i, j) != 0.0) g.set_weight(i, j, weights(i, j));
      }
    }
    return g;
  }

  std::size_t n() const { return adjacency_.size(); }
  double w_max() const { return w_max_; }
  std::uint64_t version() const { return version_; }

  double weight(Vertex i, Vertex j) const {
    check_vertex(i);
    check_vertex(j);
    return weights_(i, j);
  }

  const Eigen::MatrixXd& weights() const { return weights_; }

  void set_weight(Vertex i, Vertex j, double w) {
    check_vertex(i);
    check_vertex(j);
    if (i == j) throw std::invalid_argument("Graph: self-loops are not allowed");
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("Graph: weights must be finite and non-negative");
    if (w > w_max_) throw std::invalid_argument("Graph: weight exceeds w_max");
    const bool was_edge = weights_(i, j) > 0.0;
    weights_(i, j) = w;
    weights_(j, i) = w;
    if (was_edge != (w > 0.0)) {
      if (w > 0.0) {
        link(i, j);
        link(j, i);
        ++edge_count_;
      } else {
        unlink(i, j);
        unlink(j, i);
        --edge_count_;
      }
    }
    refresh_degree(i);
    refresh_degree(j);
    ++version_;
  }

  std::span<const Vertex> neighbors(Vertex i) const {
    check_vertex(i);
    return adjacency_[i];
  }

  /// Weighted degree d_i, summed over neighbors in ascending order.
  double degree(Vertex i) const {
    check_vertex(i);
    return degrees_(i);
  }

  const Eigen::VectorXd& degrees() const { return degrees_; }

  /// Number of undirected edges (pairs with positive weight).
  std::size_t edge_count() const { return edge_count_; }

  bool operator==(const Graph& other) const {
    return w_max_ == other.w_max_ && weights_ == other.weights_;
  }

 private:
  void check_vertex(Vertex v) const {
    if (v >= n()) throw std::out_of_range("Graph: vertex " + std::to_string(v) + " out of range");
  }

  void link(Vertex a, Vertex b) {
    auto& row = adjacency_[a];
    row.insert(std::lower_bound(row.begin(), row.end(), b), b);
  }

  void unlink(Vertex a, Vertex b) {
    auto& row = adjacency_[a];
    row.erase(std::lower_bound(row.begin(), row.end(), b));
  }

  void refresh_degree(Vertex v) {
    double d = 0.0;
    for (Vertex u : adjacency_[v]) d += weights_(v, u);
    degrees_(v) = d;
  }

  double w_max_;
  Eigen::MatrixXd weights_;
  std::vector<std::vector<Vertex>> adjacency_;
  Eigen::VectorXd degrees_;
  std::size_t edge_count_ = 0;
  std::uint64_t version_ = 0;
};

/// Non-empty proper subset of a graph's vertices.
class VertexSubset {
 public:
  VertexSubset(std::size_t n, std::span<const Vertex> members) : mask_(n, 0) {
    for (Vertex v : members) {
      if (v >= n) throw std::out_of_range("VertexSubset: vertex out of range");
      if (!mask_[v]) {
        mask_[v] = 1;
        ++size_;
      }
    }
    if (size_ == 0 || size_ >= n) throw std::invalid_argument("VertexSubset: must be non-empty and proper");
  }

  VertexSubset(std::size_t n, std::initializer_list<Vertex> members)
      : VertexSubset(n, std::span<const Vertex>(members.begin(), members.size())) {}

  std::size_t universe() const { return mask_.size(); }
  std::size_t size() const { return size_; }
  bool contains(Vertex v) const { return v < mask_.size() && mask_[v]; }

 private:
  std::vector<char> mask_;
  std::size_t size_ = 0;
};

/// Combinatorial Laplacian L = D - W.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd lap = -g.weights();
  lap.diagonal() = g.degrees();
  return lap;
}

inline double degree(const Graph& g, Vertex i) { return g.degree(i); }

/// Which vertex pairs the planner may raise.
enum class CandidateMode {
  nonedges,  ///< only pairs with zero weight
  all,       ///< every pair below the weight cap
};

struct CandidatePair {
  Vertex i;
  Vertex j;
  double headroom;  ///< w_max - w_ij, strictly positive

  bool operator==(const CandidatePair&) const = default;
};

inline bool is_candidate(const Graph& g, Vertex i, Vertex j, CandidateMode mode) {
  const double w = g.weights()(i, j);
  if (mode == CandidateMode::nonedges) return w == 0.0;
  return w < g.w_max() - kSaturationTolerance;
}

/// Unordered pairs i < j that can still take weight, in ascending (i, j) order.
inline std::vector<CandidatePair> candidate_pairs(const Graph& g, CandidateMode mode = CandidateMode::all) {
  std::vector<CandidatePair> out;
  const auto n = g.n();
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) {
      if (is_candidate(g, i, j, mode)) out.push_back({i, j, g.w_max() - g.weights()(i, j)});
    }
  }
  return out;
}

inline std::size_t count_candidates(const Graph& g, CandidateMode mode = CandidateMode::all) {
  std::size_t count = 0;
  for (Vertex i = 0; i < g.n(); ++i)
    for (Vertex j = i + 1; j < g.n(); ++j) count += is_candidate(g, i, j, mode) ? 1 : 0;
  return count;
}

inline std::vector<std::size_t> component_labels(const Graph& g) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.n(), unset);
  std::size_t next = 0;
  std::deque<Vertex> queue;
  for (Vertex root = 0; root < g.n(); ++root) {
    if (label[root] != unset) continue;
    label[root] = next;
    queue.push_back(root);
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      for (Vertex u : g.neighbors(v)) {
        if (label[u] == unset) {
          label[u] = next;
          queue.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

inline bool is_connected(const Graph& g) {
  const auto labels = component_labels(g);
  return std::all_of(labels.begin(), labels.end(), [](std::size_t l) { return l == 0; });
}

/// Cut weight of X divided by the smaller side's volume.
inline double conductance(const Graph& g, const VertexSubset& x) {
  if (x.universe() != g.n()) throw DimensionError("conductance: subset universe does not match graph");
  double cut = 0.0, vol_in = 0.0, vol_out = 0.0;
  for (Vertex v = 0; v < g.n(); ++v) {
    const bool in = x.contains(v);
    (in ? vol_in : vol_out) += g.degree(v);
    if (!in) continue;
    for (Vertex u : g.neighbors(v))
      if (!x.contains(u)) cut += g.weights()(v, u);
  }
  const double denom = std::min(vol_in, vol_out);
  if (!(denom > 0.0)) throw std::domain_error("conductance: one side of the cut has zero volume");
  return cut / denom;
}

}  // namespace depolarize
