#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "depolarize/dynamics.hpp"
#include "depolarize/graph.hpp"
#include "depolarize/io.hpp"
#include "depolarize/rng.hpp"

namespace depolarize {

/// Each unordered pair is an edge independently with probability p.
struct ErdosRenyi {
  std::size_t n = 0;
  double p = 0.0;
};

/// Two blocks of sizes ceil(n/2) and floor(n/2); vertices below ceil(n/2) form
/// block 0.
struct TwoBlockSbm {
  std::size_t n = 0;
  double p_in = 0.0;
  double q_out = 0.0;
};

/// Barabasi-Albert growth from a clique on m + 1 vertices; every later vertex
/// joins m distinct existing vertices drawn with probability proportional to
/// degree.
struct PreferentialAttachment {
  std::size_t n = 0;
  std::size_t m = 1;
};

using GraphModel = std::variant<ErdosRenyi, TwoBlockSbm, PreferentialAttachment>;

struct Uniform01 {};

/// Beta(a1, b1) on block 0, Beta(a2, b2) on block 1 (block convention above).
struct BetaByBlock {
  double a1 = 1.0, b1 = 5.0, a2 = 5.0, b2 = 1.0;
};

struct FromFile {
  std::string path;
};

using OpinionModel = std::variant<Uniform01, BetaByBlock, FromFile>;

struct GeneratorSpec {
  GraphModel graph;
  OpinionModel opinions = Uniform01{};
};

struct GeneratedInstance {
  Graph graph;
  Opinions opinions;
  std::vector<int> blocks;  ///< block label per vertex
};

inline std::size_t model_size(const GraphModel& model) {
  return std::visit([](const auto& m) { return m.n; }, model);
}

inline std::size_t first_block_size(std::size_t n) { return (n + 1) / 2; }

inline void validate(const GeneratorSpec& spec) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  };
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if (m.n < 2) throw std::invalid_argument("generator: n must be at least 2");
        if (m.n > kMaxVertices) throw std::invalid_argument("generator: n too large");
        if constexpr (std::is_same_v<M, ErdosRenyi>) prob(m.p, "p");
        if constexpr (std::is_same_v<M, TwoBlockSbm>) {
          prob(m.p_in, "p_in");
          prob(m.q_out, "q_out");
        }
        if constexpr (std::is_same_v<M, PreferentialAttachment>) {
          if (m.m < 1) throw std::invalid_argument("generator: m must be at least 1");
          if (m.n < m.m + 1) throw std::invalid_argument("generator: n must be at least m + 1");
        }
      },
      spec.graph);
  if (const auto* beta = std::get_if<BetaByBlock>(&spec.opinions)) {
    if (!(beta->a1 > 0 && beta->b1 > 0 && beta->a2 > 0 && beta->b2 > 0))
      throw std::invalid_argument("generator: Beta parameters must be positive");
  }
}

/// Beta(a, b) draw as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
inline double sample_beta(double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("sample_beta: parameters must be positive");
  const double x = rng.gamma(a);
  const double y = rng.gamma(b);
  return x / (x + y);
}

namespace detail {

inline Graph generate_graph(const ErdosRenyi& m, Rng& rng) {
  Graph g(m.n);
  for (Vertex i = 0; i < m.n; ++i)
    for (Vertex j = i + 1; j < m.n; ++j)
      if (rng.bernoulli(m.p)) g.set_weight(i, j, 1.0);
  return g;
}

inline Graph generate_graph(const TwoBlockSbm& m, Rng& rng) {
  Graph g(m.n);
  const std::size_t split = first_block_size(m.n);
  for (Vertex i = 0; i < m.n; ++i) {
    for (Vertex j = i + 1; j < m.n; ++j) {
      const bool same = (i < split) == (j < split);
      if (rng.bernoulli(same ? m.p_in : m.q_out)) g.set_weight(i, j, 1.0);
    }
  }
  return g;
}

inline Graph generate_graph(const PreferentialAttachment& m, Rng& rng) {
  Graph g(m.n);
  const std::size_t seed = m.m + 1;
  for (Vertex i = 0; i < seed; ++i)
    for (Vertex j = i + 1; j < seed; ++j) g.set_weight(i, j, 1.0);
  std::vector<double> degree(m.n, 0.0);
  for (Vertex v = 0; v < seed; ++v) degree[v] = static_cast<double>(m.m);
  std::vector<Vertex> targets;
  for (Vertex v = seed; v < m.n; ++v) {
    // Sequential draws without replacement, each proportional to the degree
    // of the vertices not yet chosen.
    targets.clear();
    double remaining = 0.0;
    for (Vertex u = 0; u < v; ++u) remaining += degree[u];
    std::vector<char> taken(v, 0);
    while (targets.size() < m.m && remaining > 0.0) {
      double r = rng.uniform() * remaining;
      Vertex pick = v;
      for (Vertex u = 0; u < v; ++u) {
        if (taken[u] || degree[u] <= 0.0) continue;
        pick = u;
        if (r < degree[u]) break;
        r -= degree[u];
      }
      taken[pick] = 1;
      remaining -= degree[pick];
      targets.push_back(pick);
    }
    for (Vertex u : targets) {
      g.set_weight(v, u, 1.0);
      degree[u] += 1.0;
    }
    degree[v] = static_cast<double>(targets.size());
  }
  return g;
}

}  // namespace detail

/// Draws a graph, then its opinions, from one seeded stream.
inline GeneratedInstance generate(const GeneratorSpec& spec, Rng& rng) {
  validate(spec);
  Graph g = std::visit([&](const auto& m) { return detail::generate_graph(m, rng); }, spec.graph);
  const std::size_t n = g.n();
  const std::size_t split = first_block_size(n);
  std::vector<int> blocks(n);
  for (Vertex v = 0; v < n; ++v) blocks[v] = v < split ? 0 : 1;

  Opinions s(static_cast<Eigen::Index>(n));
  std::visit(
      [&](const auto& model) {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, Uniform01>) {
          for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = rng.uniform();
        } else if constexpr (std::is_same_v<M, BetaByBlock>) {
          for (Vertex v = 0; v < n; ++v)
            s(static_cast<Eigen::Index>(v)) =
                blocks[v] == 0 ? sample_beta(model.a1, model.b1, rng) : sample_beta(model.a2, model.b2, rng);
        } else {
          s = io::read_opinions(model.path);
          check_dimensions(g, s, "generate");
        }
      },
      spec.opinions);
  return {std::move(g), std::move(s), std::move(blocks)};
}

}  // namespace depolarize
