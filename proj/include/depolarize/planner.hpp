#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "depolarize/dynamics.hpp"
#include "depolarize/graph.hpp"
#include "depolarize/laplacian_eigen.hpp"
#include "depolarize/perturbation.hpp"
#include "depolarize/rng.hpp"

namespace depolarize {

enum class Heuristic {
  random,
  disagreement_seeking,
  coordinate_descent,
  fiedler_difference,
};

inline constexpr std::array<Heuristic, 4> kAllHeuristics = {Heuristic::random, Heuristic::disagreement_seeking,
                                                            Heuristic::coordinate_descent,
                                                            Heuristic::fiedler_difference};

/// Short name used in file names and on the command line.
inline std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::random: return "random";
    case Heuristic::disagreement_seeking: return "ds";
    case Heuristic::coordinate_descent: return "cd";
    case Heuristic::fiedler_difference: return "fd";
  }
  return "?";
}

inline std::optional<Heuristic> parse_heuristic(std::string_view name) {
  if (name == "random") return Heuristic::random;
  if (name == "ds" || name == "disagreement_seeking") return Heuristic::disagreement_seeking;
  if (name == "cd" || name == "coordinate_descent") return Heuristic::coordinate_descent;
  if (name == "fd" || name == "fiedler_difference") return Heuristic::fiedler_difference;
  return std::nullopt;
}

inline bool needs_opinions(Heuristic h) {
  return h == Heuristic::disagreement_seeking || h == Heuristic::coordinate_descent;
}

struct PlannerOptions {
  CandidateMode candidates = CandidateMode::all;
  /// Worker threads for candidate scoring; 0 means one per hardware thread.
  unsigned threads = 1;
};

struct VertexPair {
  Vertex i = 0;
  Vertex j = 0;

  bool operator==(const VertexPair&) const = default;
};

namespace detail {

struct ScoredPair {
  double score;
  Vertex i;
  Vertex j;
};

// Higher score wins; equal scores go to the lexicographically smaller pair.
inline bool better(const ScoredPair& a, const ScoredPair& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Argmax of score(i, j) * headroom over candidate pairs. Rows are dealt
// round-robin to workers; the per-worker winners are reduced with the same
// ordering, so the result does not depend on the thread count.
template <class Score>
std::optional<VertexPair> argmax_candidates(const Graph& g, const PlannerOptions& opts, const Score& score) {
  const std::size_t n = g.n();
  const unsigned workers = std::min<unsigned>(resolve_threads(opts.threads), n >= 128 ? 64u : 1u);
  std::vector<std::optional<ScoredPair>> best(workers);
  auto scan = [&](unsigned worker) {
    std::optional<ScoredPair> local;
    for (Vertex i = worker; i < n; i += workers) {
      for (Vertex j = i + 1; j < n; ++j) {
        if (!is_candidate(g, i, j, opts.candidates)) continue;
        const ScoredPair candidate{(g.w_max() - g.weights()(i, j)) * score(i, j), i, j};
        if (!local || better(candidate, *local)) local = candidate;
      }
    }
    best[worker] = local;
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    for (auto& t : pool) t.join();
  }
  std::optional<ScoredPair> winner;
  for (const auto& b : best)
    if (b && (!winner || better(*b, *winner))) winner = b;
  if (!winner) return std::nullopt;
  return VertexPair{winner->i, winner->j};
}

inline std::optional<VertexPair> pick_uniform(const Graph& g, CandidateMode mode, Rng& rng) {
  const std::size_t total = count_candidates(g, mode);
  if (total == 0) return std::nullopt;
  std::size_t target = rng.uniform_index(total);
  for (Vertex i = 0; i < g.n(); ++i) {
    for (Vertex j = i + 1; j < g.n(); ++j) {
      if (!is_candidate(g, i, j, mode)) continue;
      if (target-- == 0) return VertexPair{i, j};
    }
  }
  return std::nullopt;
}

inline Eigen::VectorXd fiedler_vector(const Graph& g) {
  if (g.n() == 2) return Eigen::Vector2d(1.0, -1.0) / std::sqrt(2.0);
  return low_spectrum(g).fiedler;
}

// Per-graph quantities each heuristic scores against.
struct ScoringInputs {
  const PerturbationAnalysis* analysis = nullptr;  // DS and CD
  const Eigen::VectorXd* fiedler = nullptr;        // FD
};

inline std::optional<VertexPair> select_with(const Graph& g, Heuristic h, Rng& rng, const PlannerOptions& opts,
                                             const ScoringInputs& in) {
  switch (h) {
    case Heuristic::random:
      return pick_uniform(g, opts.candidates, rng);
    case Heuristic::disagreement_seeking: {
      const Opinions& z = in.analysis->expressed();
      return argmax_candidates(g, opts, [&](Vertex i, Vertex j) {
        const double d = z(i) - z(j);
        return d * d;
      });
    }
    case Heuristic::coordinate_descent: {
      const PerturbationAnalysis& a = *in.analysis;
      return argmax_candidates(g, opts, [&](Vertex i, Vertex j) { return -a.derivative(i, j); });
    }
    case Heuristic::fiedler_difference: {
      const Eigen::VectorXd& v = *in.fiedler;
      return argmax_candidates(g, opts, [&](Vertex i, Vertex j) { return std::abs(v(i) - v(j)); });
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Picks the pair the heuristic would saturate next, or nothing when no
/// candidate pair remains. DS and CD need the innate opinions.
inline std::optional<VertexPair> select_edge(const Graph& g, const Opinions* innate, Heuristic h, Rng& rng,
                                             const PlannerOptions& opts = {}) {
  if (needs_opinions(h) && innate == nullptr)
    throw std::invalid_argument("select_edge: heuristic " + std::string(to_string(h)) + " needs innate opinions");
  if (count_candidates(g, opts.candidates) == 0) return std::nullopt;
  std::optional<PerturbationAnalysis> analysis;
  std::optional<Eigen::VectorXd> fiedler;
  detail::ScoringInputs in;
  if (needs_opinions(h)) {
    analysis.emplace(g, *innate);
    in.analysis = &*analysis;
  } else if (h == Heuristic::fiedler_difference) {
    fiedler = detail::fiedler_vector(g);
    in.fiedler = &*fiedler;
  }
  return detail::select_with(g, h, rng, opts, in);
}

inline std::optional<VertexPair> select_edge(const Graph& g, const Opinions& innate, Heuristic h, Rng& rng,
                                             const PlannerOptions& opts = {}) {
  return select_edge(g, &innate, h, rng, opts);
}

struct StepMetrics {
  double polarization = 0.0;
  double spectral_gap = 0.0;
  std::optional<double> assortativity;
};

/// One saturation performed by the planner and the metrics right after it.
struct InterventionStep {
  std::size_t step_index = 0;  ///< 1-based
  VertexPair edge;
  double weight_added = 0.0;
  StepMetrics after;
};

struct Trajectory {
  StepMetrics initial;
  std::vector<InterventionStep> steps;
  Graph final_graph;

  const StepMetrics& final_metrics() const { return steps.empty() ? initial : steps.back().after; }
};

/// Greedy budgeted intervention: up to `budget` times, select a pair with the
/// heuristic and raise its weight to the cap. Stops early when no candidates
/// remain. Expressed polarization, spectral gap and innate-opinion
/// assortativity are recorded after every step.
inline Trajectory run_budgeted(Graph g, const Opinions& innate, Heuristic h, std::size_t budget, Rng& rng,
                               const PlannerOptions& opts = {}) {
  check_dimensions(g, innate, "run_budgeted");

  // Everything derived from one graph version: the factorization feeds both
  // the polarization metric and DS/CD scoring, the eigensolve feeds both the
  // gap metric and FD scoring.
  struct Snapshot {
    std::unique_ptr<PerturbationAnalysis> analysis;
    Eigen::VectorXd fiedler;
    StepMetrics metrics;
  };
  auto snapshot = [&](const Graph& current) {
    Snapshot snap;
    snap.analysis = std::make_unique<PerturbationAnalysis>(current, innate);
    snap.metrics.polarization = snap.analysis->polarization();
    if (h == Heuristic::fiedler_difference && current.n() >= 3) {
      LowSpectrum spectrum = low_spectrum(current);
      snap.metrics.spectral_gap = spectrum.lambda2;
      snap.fiedler = std::move(spectrum.fiedler);
    } else {
      if (h == Heuristic::fiedler_difference && current.n() == 2) snap.fiedler = detail::fiedler_vector(current);
      snap.metrics.spectral_gap = spectral_gap(current);
    }
    snap.metrics.assortativity = opinion_assortativity(current, innate);
    return snap;
  };

  Snapshot snap = snapshot(g);
  StepMetrics initial = snap.metrics;
  std::vector<InterventionStep> steps;
  steps.reserve(budget);
  for (std::size_t step = 1; step <= budget; ++step) {
    const std::optional<VertexPair> pick =
        detail::select_with(g, h, rng, opts, {snap.analysis.get(), &snap.fiedler});
    if (!pick) break;
    const double headroom = g.w_max() - g.weights()(pick->i, pick->j);
    snap.analysis.reset();
    g.set_weight(pick->i, pick->j, g.w_max());
    snap = snapshot(g);
    steps.push_back({step, *pick, headroom, snap.metrics});
  }
  return {initial, std::move(steps), std::move(g)};
}

}  // namespace depolarize
