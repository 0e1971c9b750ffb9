#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "depolarize/graph.hpp"
#include "depolarize/laplacian_eigen.hpp"

namespace depolarize {

/// How the isoperimetric number is obtained.
enum class CheegerMode {
  exact,  ///< minimum over every proper subset; n <= kExactCheegerLimit
  sweep,  ///< minimum over prefix cuts of the Fiedler ordering; an upper bound
};

inline constexpr std::size_t kExactCheegerLimit = 20;

namespace detail {

// Exhaustive minimum conductance. Vertex n-1 is pinned outside X (conductance
// is symmetric in X and its complement) and subsets are walked in Gray-code
// order so each step moves a single vertex.
inline double exact_isoperimetric(const Graph& g) {
  const std::size_t n = g.n();
  const std::size_t free = n - 1;
  const Eigen::MatrixXd& w = g.weights();
  const Eigen::VectorXd& d = g.degrees();
  const double total_volume = d.sum();

  std::vector<char> in(n, 0);
  double cut = 0.0, vol = 0.0;
  double best = 1.0;
  bool seen = false;
  const std::uint64_t count = std::uint64_t{1} << free;
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto v = static_cast<Vertex>(__builtin_ctzll(k));
    // Moving v across the cut: edges to the side it leaves become crossing,
    // edges to the side it joins stop crossing.
    double to_in = 0.0;
    for (Vertex u : g.neighbors(v))
      if (in[u]) to_in += w(v, u);
    const double to_out = d(v) - to_in;
    if (in[v]) {
      cut += to_in - to_out;
      vol -= d(v);
      in[v] = 0;
    } else {
      cut += to_out - to_in;
      vol += d(v);
      in[v] = 1;
    }
    const double denom = std::min(vol, total_volume - vol);
    if (denom > 0.0) {
      const double h = std::max(0.0, cut) / denom;
      if (!seen || h < best) best = h;
      seen = true;
    }
  }
  return best;
}

}  // namespace detail

/// Cheeger constant: minimum conductance over non-empty proper subsets.
///
/// Disconnected graphs return 0 in both modes. Sweep mode walks the n - 1
/// prefix cuts of the vertices sorted by Fiedler value (ties by index) and so
/// only bounds the true value from above.
inline double isoperimetric_number(const Graph& g, CheegerMode mode) {
  const std::size_t n = g.n();
  if (n < 2) throw std::invalid_argument("isoperimetric_number: needs at least 2 vertices");
  if (mode == CheegerMode::exact && n > kExactCheegerLimit)
    throw std::length_error("isoperimetric_number: exact mode limited to n <= " + std::to_string(kExactCheegerLimit));
  if (!is_connected(g)) return 0.0;
  if (mode == CheegerMode::exact || n < 3) return detail::exact_isoperimetric(g);

  const Eigen::VectorXd fiedler = low_spectrum(g).fiedler;
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return fiedler(a) < fiedler(b); });

  const Eigen::MatrixXd& w = g.weights();
  const double total_volume = g.degrees().sum();
  std::vector<char> in(n, 0);
  double cut = 0.0, vol = 0.0, best = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vertex v = order[k];
    double to_in = 0.0;
    for (Vertex u : g.neighbors(v))
      if (in[u]) to_in += w(v, u);
    cut += g.degree(v) - 2.0 * to_in;
    vol += g.degree(v);
    in[v] = 1;
    const double denom = std::min(vol, total_volume - vol);
    best = std::min(best, std::max(0.0, cut) / denom);
  }
  return best;
}

}  // namespace depolarize
