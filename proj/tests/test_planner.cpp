#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace dp_test;

namespace {

Opinions vec(std::initializer_list<double> xs) {
  Opinions s(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) s(k++) = x;
  return s;
}

// Brute-force argmax of headroom * score over candidates, ties to smallest (i, j).
template <class Score>
std::optional<VertexPair> brute_argmax(const Graph& g, CandidateMode mode, Score score) {
  std::optional<VertexPair> best;
  double best_value = 0.0;
  for (const CandidatePair& c : candidate_pairs(g, mode)) {
    const double value = c.headroom * score(c.i, c.j);
    if (!best || value > best_value) {
      best = VertexPair{c.i, c.j};
      best_value = value;
    }
  }
  return best;
}

// Score of a brute-force pick; ties make pair identity ambiguous only up to
// floating noise, so compare scores as well as pairs.
double oracle_cd_score(const Graph& g, const Opinions& s, Vertex i, Vertex j) {
  const Opinions z = oracle_equilibrium(g, s);
  const Eigen::VectorXd zc = z.array() - z.mean();
  const Eigen::VectorXd y = system_matrix(g).colPivHouseholderQr().solve(zc);
  return 2.0 * (z(i) - z(j)) * (y(i) - y(j));
}

}  // namespace

TEST(Heuristics, Names) {
  for (Heuristic h : kAllHeuristics) EXPECT_EQ(parse_heuristic(to_string(h)), h);
  EXPECT_EQ(parse_heuristic("coordinate_descent"), Heuristic::coordinate_descent);
  EXPECT_FALSE(parse_heuristic("greedy").has_value());
}

TEST(SelectEdge, SaturatedCompleteGraphHasNone) {
  Rng rng(1);
  const Graph g = complete_graph(5);
  for (Heuristic h : kAllHeuristics)
    EXPECT_FALSE(select_edge(g, Opinions::Constant(5, 0.2), h, rng).has_value());
}

TEST(SelectEdge, DisagreementOnEmptyGraph) {
  Rng rng(1);
  const auto pick = select_edge(Graph(3), vec({0.0, 0.5, 1.0}), Heuristic::disagreement_seeking, rng);
  ASSERT_TRUE(pick.has_value());
  EXPECT_EQ(*pick, (VertexPair{0, 2}));
}

TEST(SelectEdge, OpinionsRequiredForDsAndCd) {
  Rng rng(1);
  const Graph g(4);
  EXPECT_THROW(select_edge(g, nullptr, Heuristic::disagreement_seeking, rng), std::invalid_argument);
  EXPECT_THROW(select_edge(g, nullptr, Heuristic::coordinate_descent, rng), std::invalid_argument);
  EXPECT_NO_THROW(select_edge(g, nullptr, Heuristic::fiedler_difference, rng));
  EXPECT_NO_THROW(select_edge(g, nullptr, Heuristic::random, rng));
}

TEST(SelectEdge, TiesGoToSmallestPair) {
  Rng rng(1);
  // Empty graph with constant opinions: every DS score is zero.
  const auto pick = select_edge(Graph(5), Opinions::Constant(5, 0.5), Heuristic::disagreement_seeking, rng);
  ASSERT_TRUE(pick.has_value());
  EXPECT_EQ(*pick, (VertexPair{0, 1}));
}

TEST(SelectEdge, FiedlerPicksCrossCutPair) {
  // Two triangles joined by one edge; the Fiedler vector separates them.
  Graph g(6);
  for (Vertex base : {0u, 3u})
    for (Vertex a = 0; a < 3; ++a)
      for (Vertex b = a + 1; b < 3; ++b) g.set_weight(base + a, base + b, 1.0);
  g.set_weight(2, 3, 1.0);
  Rng rng(1);
  const auto pick = select_edge(g, nullptr, Heuristic::fiedler_difference, rng);
  ASSERT_TRUE(pick.has_value());
  const LowSpectrum sp = low_spectrum(g);
  const auto want = brute_argmax(g, CandidateMode::all,
                                 [&](Vertex i, Vertex j) { return std::abs(sp.fiedler(i) - sp.fiedler(j)); });
  EXPECT_EQ(*pick, *want);
  EXPECT_NE(sp.fiedler(pick->i) > 0, sp.fiedler(pick->j) > 0);
}

TEST(SelectEdge, AgreesWithBruteForceAlongTrajectories) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(9);
    Graph g = random_graph(n, 0.3, rng);
    const Opinions s = random_opinions(n, rng);
    for (Heuristic h : {Heuristic::disagreement_seeking, Heuristic::coordinate_descent}) {
      Graph cur = g;
      for (int step = 0; step < 6; ++step) {
        Rng unused(0);
        const auto pick = select_edge(cur, s, h, unused);
        if (!pick) break;
        const Opinions z = oracle_equilibrium(cur, s);
        auto score = [&](Vertex i, Vertex j) {
          return h == Heuristic::disagreement_seeking ? (z(i) - z(j)) * (z(i) - z(j)) : oracle_cd_score(cur, s, i, j);
        };
        const auto want = brute_argmax(cur, CandidateMode::all, score);
        ASSERT_TRUE(want.has_value());
        const double headroom_pick = cur.w_max() - cur.weight(pick->i, pick->j);
        const double headroom_want = cur.w_max() - cur.weight(want->i, want->j);
        EXPECT_NEAR(headroom_pick * score(pick->i, pick->j), headroom_want * score(want->i, want->j), 1e-12);
        cur.set_weight(pick->i, pick->j, cur.w_max());
      }
    }
  }
}

TEST(SelectEdge, ThreadCountDoesNotChangeChoice) {
  Rng rng(3);
  const Graph g = random_graph(150, 0.05, rng);
  const Opinions s = random_opinions(150, rng);
  for (Heuristic h : {Heuristic::disagreement_seeking, Heuristic::coordinate_descent, Heuristic::fiedler_difference}) {
    Rng a(0), b(0);
    PlannerOptions one, many;
    many.threads = 4;
    EXPECT_EQ(select_edge(g, s, h, a, one), select_edge(g, s, h, b, many));
  }
}

TEST(SelectEdge, RandomIsUniformOverCandidates) {
  Graph g(4);
  g.set_weight(0, 1, 1.0);
  Rng rng(4);
  std::map<std::pair<Vertex, Vertex>, int> counts;
  const int draws = 50000;
  for (int k = 0; k < draws; ++k) {
    const auto pick = select_edge(g, nullptr, Heuristic::random, rng);
    counts[{pick->i, pick->j}]++;
  }
  EXPECT_EQ(counts.size(), 5u);
  EXPECT_EQ(counts.count({0, 1}), 0u);
  for (const auto& [pair, c] : counts) EXPECT_NEAR(c, draws / 5.0, 5 * std::sqrt(draws * 0.2 * 0.8));
}

TEST(RunBudgeted, ZeroBudget) {
  Rng rng(5);
  const Graph g = random_graph(8, 0.3, rng);
  const Opinions s = random_opinions(8, rng);
  const Trajectory t = run_budgeted(g, s, Heuristic::coordinate_descent, 0, rng);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.final_graph, g);
  EXPECT_DOUBLE_EQ(t.initial.polarization, polarization(equilibrium_opinions(g, s)));
}

TEST(RunBudgeted, ExhaustiveBudgetReachesFloor) {
  Rng rng(6);
  for (std::size_t n = 2; n <= 8; ++n) {
    const Graph g = random_graph(n, 0.4, rng);
    const Opinions s = random_opinions(n, rng);
    for (Heuristic h : kAllHeuristics) {
      const Trajectory t = run_budgeted(g, s, h, n * n, rng);
      EXPECT_EQ(t.final_graph, complete_graph(n));
      EXPECT_NEAR(t.final_metrics().polarization, complete_graph_floor(s, 1.0), 1e-9);
      EXPECT_EQ(t.steps.size(), count_candidates(g));
    }
  }
}

TEST(RunBudgeted, StepInvariants) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 6 + rng.uniform_index(20);
    const Graph g = random_graph(n, 0.2, rng);
    const Opinions s = random_opinions(n, rng);
    const double floor = complete_graph_floor(s, 1.0);
    for (Heuristic h : kAllHeuristics) {
      PlannerOptions opts;
      opts.candidates = trial % 2 ? CandidateMode::nonedges : CandidateMode::all;
      const Trajectory t = run_budgeted(g, s, h, n, rng, opts);
      std::set<std::pair<Vertex, Vertex>> used;
      double last_gap = t.initial.spectral_gap;
      for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const InterventionStep& step = t.steps[k];
        EXPECT_EQ(step.step_index, k + 1);
        EXPECT_GT(step.weight_added, 0.0);
        EXPECT_GE(step.after.polarization, floor - 1e-12);
        EXPECT_TRUE(used.insert({step.edge.i, step.edge.j}).second);
        EXPECT_EQ(t.final_graph.weight(step.edge.i, step.edge.j), 1.0);
        if (h == Heuristic::fiedler_difference) {
          EXPECT_GE(step.after.spectral_gap, last_gap - 1e-9);
        }
        last_gap = step.after.spectral_gap;
      }
    }
  }
}

TEST(RunBudgeted, RandomIsReproducible) {
  Rng gen(8);
  const Graph g = random_graph(30, 0.1, gen);
  const Opinions s = random_opinions(30, gen);
  Rng a(99), b(99);
  const Trajectory ta = run_budgeted(g, s, Heuristic::random, 15, a);
  const Trajectory tb = run_budgeted(g, s, Heuristic::random, 15, b);
  ASSERT_EQ(ta.steps.size(), tb.steps.size());
  for (std::size_t k = 0; k < ta.steps.size(); ++k) {
    EXPECT_EQ(ta.steps[k].edge, tb.steps[k].edge);
    EXPECT_EQ(ta.steps[k].after.polarization, tb.steps[k].after.polarization);
  }
}

TEST(RunBudgeted, TwoVertexFiedler) {
  Rng rng(9);
  const Trajectory t = run_budgeted(Graph(2), vec({0.0, 1.0}), Heuristic::fiedler_difference, 3, rng);
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_NEAR(t.final_metrics().spectral_gap, 2.0, 1e-12);
}
