#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace dp_test;

namespace {

Opinions vec(std::initializer_list<double> xs) {
  Opinions s(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) s(k++) = x;
  return s;
}

}  // namespace

TEST(Equilibrium, ConstantOpinionsAreFixed) {
  Rng rng(1);
  const Graph g = random_graph(12, 0.4, rng);
  const Opinions z = equilibrium_opinions(g, Opinions::Constant(12, 0.37));
  EXPECT_LT((z.array() - 0.37).abs().maxCoeff(), 1e-14);
}

TEST(Equilibrium, TwoPath) {
  const Opinions z = equilibrium_opinions(path_graph(2), vec({0.0, 1.0}));
  EXPECT_NEAR(z(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(z(1), 2.0 / 3.0, 1e-15);
}

TEST(Equilibrium, SaturatedTriangle) {
  const Opinions z = equilibrium_opinions(complete_graph(3), vec({0.0, 0.0, 1.0}));
  EXPECT_NEAR(z(0), 0.25, 1e-15);
  EXPECT_NEAR(z(1), 0.25, 1e-15);
  EXPECT_NEAR(z(2), 0.5, 1e-15);
}

TEST(Equilibrium, DimensionMismatch) {
  EXPECT_THROW(equilibrium_opinions(path_graph(3), vec({0.0, 1.0})), DimensionError);
}

TEST(Equilibrium, ResidualMeanAndContraction) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    const Graph g = random_graph(n, rng.uniform(), rng);
    const Opinions s = random_opinions(n, rng);
    const Opinions z = equilibrium_opinions(g, s);
    const Eigen::VectorXd r = s - system_matrix(g) * z;
    EXPECT_LE(r.norm(), 1e-10 * s.norm());
    EXPECT_LE(std::abs(z.mean() - s.mean()), 1e-10);
    EXPECT_LE(polarization(z), polarization(s) + 1e-14);
  }
}

TEST(Iteration, IsolatedVerticesSettleImmediately) {
  const Opinions s = vec({0.1, 0.9, 0.4});
  const IterationResult r = iterate_opinions(Graph(3), s, 10, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.steps, 1u);
  EXPECT_EQ(r.opinions, s);
}

TEST(Iteration, TwoPathConverges) {
  const IterationResult r = iterate_opinions(path_graph(2), vec({0.0, 1.0}), 10000, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.opinions(0), 1.0 / 3.0, 1e-11);
  EXPECT_NEAR(r.opinions(1), 2.0 / 3.0, 1e-11);
}

TEST(Iteration, ConstantStaysConstant) {
  const IterationResult r = iterate_opinions(complete_graph(4), Opinions::Constant(4, 0.6), 5, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.opinions.array() - 0.6).abs().maxCoeff(), 1e-15);
}

TEST(Iteration, ReportsNonConvergence) {
  const IterationResult r = iterate_opinions(path_graph(10), vec({0, 1, 0, 1, 0, 1, 0, 1, 0, 1}), 3, 1e-14);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.steps, 3u);
  EXPECT_THROW(iterate_opinions(path_graph(2), vec({0, 1}), 3, 0.0), std::invalid_argument);
}

TEST(Iteration, AgreesWithLinearSolve) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(30);
    const Graph g = random_graph(n, rng.uniform(), rng);
    const Opinions s = random_opinions(n, rng);
    const IterationResult r = iterate_opinions(g, s, 200000, 1e-12);
    ASSERT_TRUE(r.converged);
    EXPECT_LT((r.opinions - equilibrium_opinions(g, s)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Polarization, Examples) {
  EXPECT_EQ(polarization(Opinions::Constant(5, 0.3)), 0.0);
  EXPECT_DOUBLE_EQ(polarization(vec({0.0, 1.0})), 0.5);
  const Opinions x = vec({0.3, -1.0, 2.5, 0.0});
  EXPECT_NEAR(polarization(x), oracle_polarization(x), 1e-15);
  EXPECT_NEAR(mean_center(x).sum(), 0.0, 1e-12 * 4);
}

TEST(Disagreement, Examples) {
  EXPECT_EQ(disagreement(vec({0.4, 0.4}), 0, 1), 0.0);
  EXPECT_EQ(disagreement(vec({0.0, 1.0}), 0, 1), 1.0);
  EXPECT_NEAR(disagreement(vec({0.2, 0.7}), 0, 1), 0.25, 1e-15);
  EXPECT_THROW(disagreement(vec({0.2, 0.7}), 0, 2), std::out_of_range);
}

TEST(ContractionBoundsTest, DisconnectedUpperIsInnatePolarization) {
  Graph g(4);
  g.set_weight(0, 1, 1.0);
  const Opinions s = vec({0.0, 0.2, 0.9, 1.0});
  const ContractionBounds b = polarization_bounds(g, s, CheegerMode::exact);
  EXPECT_EQ(b.upper, polarization(s));
  EXPECT_FALSE(b.upper_is_heuristic);
}

TEST(ContractionBoundsTest, CompleteGraphLowerUsesCapTimesN) {
  const Opinions s = vec({0.0, 0.1, 0.5, 0.7, 1.0});
  const ContractionBounds b = polarization_bounds(complete_graph(5), s, CheegerMode::exact);
  EXPECT_NEAR(b.lower, polarization(s) / 36.0, 1e-15);
}

TEST(ContractionBoundsTest, SandwichOnRandomConnectedGraphs) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(9);
    const Graph g = random_connected_graph(n, rng.uniform(), rng);
    const Opinions s = random_opinions(n, rng);
    const ContractionBounds b = polarization_bounds(g, s, CheegerMode::exact);
    const double p = polarization(equilibrium_opinions(g, s));
    EXPECT_LE(b.lower, p * (1 + 1e-12));
    EXPECT_LE(p, b.upper * (1 + 1e-12));
    EXPECT_LE(b.lower, b.upper);
  }
}

TEST(ContractionBoundsTest, SweepFlaggedHeuristic) {
  Rng rng(6);
  const Graph g = random_connected_graph(30, 0.2, rng);
  const ContractionBounds b = polarization_bounds(g, random_opinions(30, rng), CheegerMode::sweep);
  EXPECT_TRUE(b.upper_is_heuristic);
  EXPECT_EQ(b.h_mode, CheegerMode::sweep);
}

TEST(CompleteGraphFloor, Examples) {
  EXPECT_EQ(complete_graph_floor(Opinions::Constant(4, 0.2), 1.0), 0.0);
  const Opinions s = vec({0.0, 0.0, 1.0});
  EXPECT_NEAR(complete_graph_floor(s, 1.0), 1.0 / 24.0, 1e-16);
  EXPECT_NEAR(polarization(equilibrium_opinions(complete_graph(3), s)), 1.0 / 24.0, 1e-15);
}

TEST(CompleteGraphFloor, NoGraphGoesBelow) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(15);
    const Opinions s = random_opinions(n, rng);
    const Graph g = random_graph(n, rng.uniform(), rng);
    EXPECT_GE(polarization(equilibrium_opinions(g, s)), complete_graph_floor(s, 1.0) * (1 - 1e-12));
  }
}

TEST(Assortativity, BipartiteOppositeSidesIsMinusOne) {
  Graph g(4);
  g.set_weight(0, 2, 1.0);
  g.set_weight(0, 3, 1.0);
  g.set_weight(1, 2, 0.5);
  g.set_weight(1, 3, 1.0);
  const auto r = opinion_assortativity(g, vec({0.0, 0.0, 1.0, 1.0}));
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(*r, -1.0, 1e-14);
}

TEST(Assortativity, DisjointCliquesIsPlusOne) {
  Graph g(6);
  for (Vertex base : {0u, 3u})
    for (Vertex a = 0; a < 3; ++a)
      for (Vertex b = a + 1; b < 3; ++b) g.set_weight(base + a, base + b, 1.0);
  const auto r = opinion_assortativity(g, vec({0.1, 0.1, 0.1, 0.8, 0.8, 0.8}));
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(*r, 1.0, 1e-14);
}

TEST(Assortativity, UndefinedCases) {
  EXPECT_FALSE(opinion_assortativity(complete_graph(10), Opinions::Constant(10, 0.5)).has_value());
  EXPECT_FALSE(opinion_assortativity(Graph(3), vec({0.0, 0.5, 1.0})).has_value());
}

TEST(Assortativity, MatchesEdgeListPearson) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(20);
    const Graph g = random_graph(n, 0.5, rng);
    if (g.edge_count() == 0) continue;
    const Opinions s = random_opinions(n, rng);
    // Weighted Pearson over the doubled list of ordered endpoint pairs.
    double sw = 0, sx = 0, sy = 0;
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = 0; j < n; ++j)
        if (g.weight(i, j) > 0) {
          sw += g.weight(i, j);
          sx += g.weight(i, j) * s(i);
          sy += g.weight(i, j) * s(j);
        }
    const double mx = sx / sw, my = sy / sw;
    double cxy = 0, cxx = 0, cyy = 0;
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = 0; j < n; ++j)
        if (g.weight(i, j) > 0) {
          cxy += g.weight(i, j) * (s(i) - mx) * (s(j) - my);
          cxx += g.weight(i, j) * (s(i) - mx) * (s(i) - mx);
          cyy += g.weight(i, j) * (s(j) - my) * (s(j) - my);
        }
    const auto r = opinion_assortativity(g, s);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, cxy / std::sqrt(cxx * cyy), 1e-12);
  }
}
