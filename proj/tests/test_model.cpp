#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "probesched/error.hpp"
#include "probesched/io.hpp"
#include "probesched/model.hpp"
#include "probesched/rng.hpp"

using namespace probesched;

TEST(NodeSet, CanonicalizesMembers) {
  const NodeSet a({3, 1, 3, 2});
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a, (NodeSet{1, 2, 3}));
  EXPECT_EQ(a.max_id(), 3u);
  EXPECT_TRUE(a.contains(2));
  EXPECT_FALSE(a.contains(0));
  EXPECT_THROW(NodeSet(std::vector<NodeId>{}), ValidationError);
}

TEST(Graph, TwoNodeCycle) {
  const Graph g = load_graph("0 1\n1 0\n");
  EXPECT_EQ(g.n(), 2u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.total_degree(0), 2u);
  EXPECT_EQ(g.total_degree(1), 2u);
}

TEST(Graph, DuplicateEdgesCollapse) {
  const Graph g = load_graph("# c\n0 1\n0 1\n");
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.out_degree(0), 1u);
  EXPECT_EQ(g.in_degree(1), 1u);
}

TEST(Graph, ParseErrorsCarryLineNumbers) {
  try {
    load_graph("0 1\n# fine\n2 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_graph(""), ParseError);
  EXPECT_THROW(load_graph("# only comments\n"), ParseError);
  EXPECT_THROW(load_graph("0 1 2\n"), ParseError);
}

TEST(Graph, OneBasedIdsShiftOnlyWhenAsked) {
  const Graph zero = load_graph("1 2\n");
  EXPECT_EQ(zero.n(), 3u);
  const Graph one = load_graph("1 2\n", {.one_based = true});
  EXPECT_EQ(one.n(), 2u);
  EXPECT_EQ(one.out_neighbors(0)[0], 1u);
  EXPECT_THROW(load_graph("0 1\n", {.one_based = true}), ParseError);
}

TEST(Graph, UndirectedAddsReverse) {
  const Graph g = load_graph("0 1\n1 2\n", {.undirected = true});
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_EQ(g.in_degree(0), 1u);
}

TEST(Graph, NodesHeaderKeepsIsolatedNodes) {
  const Graph g = load_graph("# Nodes: 5 Edges: 1\n0 1\n");
  EXPECT_EQ(g.n(), 5u);
  EXPECT_EQ(g.total_degree(4), 0u);
}

TEST(Graph, EdgeListRoundTrip) {
  CounterRng rng(11);
  std::vector<Edge> edges;
  for (int k = 0; k < 200; ++k) {
    edges.push_back({static_cast<NodeId>(rng.below(40)), static_cast<NodeId>(rng.below(40))});
  }
  const Graph g(45, edges);
  const Graph back = load_graph(format_edge_list(g));
  EXPECT_EQ(back, g);
}

TEST(Graph, AdjacencyAgreesWithEdges) {
  const Graph g(4, {{0, 1}, {0, 2}, {3, 0}, {2, 1}});
  std::size_t out_total = 0, in_total = 0;
  for (NodeId v = 0; v < 4; ++v) {
    out_total += g.out_degree(v);
    in_total += g.in_degree(v);
  }
  EXPECT_EQ(out_total, g.edge_count());
  EXPECT_EQ(in_total, g.edge_count());
  ASSERT_EQ(g.in_neighbors(1).size(), 2u);
  EXPECT_EQ(g.in_neighbors(1)[0], 0u);
  EXPECT_EQ(g.in_neighbors(1)[1], 2u);
  EXPECT_THROW(Graph(2, {{0, 2}}), ValidationError);
}

TEST(Graph, RelabelPreservesDegreeMultiset) {
  const Graph g(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
  const std::vector<NodeId> perm{2, 0, 3, 1};
  const Graph h = g.relabeled(perm);
  for (NodeId v = 0; v < 4; ++v) {
    EXPECT_EQ(h.out_degree(perm[v]), g.out_degree(v));
    EXPECT_EQ(h.in_degree(perm[v]), g.in_degree(v));
  }
}

TEST(SetMass, Examples) {
  EXPECT_DOUBLE_EQ(set_mass(Schedule::uniform(2), NodeSet{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(set_mass(validate_schedule(std::vector<double>{1.0, 0.0}), NodeSet{1}), 0.0);
  EXPECT_NEAR(set_mass(validate_schedule(std::vector<double>{0.3, 0.3, 0.4}), NodeSet{0, 2}), 0.7, 1e-15);
  EXPECT_THROW(set_mass(Schedule::uniform(2), NodeSet{2}), DimensionError);
}

TEST(SetMass, ClampedToUnitInterval) {
  CounterRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> raw(6);
    double total = 0.0;
    for (double& x : raw) total += (x = rng.uniform());
    for (double& x : raw) x /= total;
    const Schedule p = validate_schedule(raw);
    const double m = set_mass(p, NodeSet{0, 1, 2, 3, 4, 5});
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
}

TEST(Schedule, Validation) {
  const std::vector<double> quarter{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(validate_schedule(quarter).probs()[2], 0.25);
  try {
    validate_schedule(std::vector<double>{0.7, 0.4});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("1.1"), std::string::npos);
  }
  const Schedule dust = validate_schedule(std::vector<double>{1.0 + 3e-13, -3e-13});
  EXPECT_EQ(dust[1], 0.0);
  EXPECT_NEAR(dust[0], 1.0, 1e-15);
  try {
    validate_schedule(std::vector<double>{1.5, -0.5});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("entry 1"), std::string::npos);
  }
  EXPECT_THROW(validate_schedule(std::vector<double>{}), ValidationError);
}

TEST(Schedule, FileRoundTripIsExact) {
  CounterRng rng(3);
  std::vector<double> raw(17);
  double total = 0.0;
  for (double& x : raw) total += (x = rng.uniform());
  for (double& x : raw) x /= total;
  const Schedule p = validate_schedule(raw);
  const Schedule back = parse_schedule(format_schedule(p));
  EXPECT_EQ(back, p);
  EXPECT_THROW(parse_schedule("1 0.5\n0 0.5\n"), ParseError);
}

TEST(Process, ValidatesAndCanonicalizes) {
  const GeneratingProcess proc = parse_process("0.5 1 0\n# c\n0.2 0\n0.3 1\n");
  EXPECT_EQ(proc.n(), 2u);
  ASSERT_EQ(proc.size(), 3u);
  EXPECT_EQ(proc.sets()[0].set, NodeSet{0});
  EXPECT_EQ(proc.sets()[1].set, (NodeSet{0, 1}));
  EXPECT_NEAR(proc.total_weight(), 1.0, 1e-15);
  EXPECT_THROW(parse_process("1.5 0\n"), ParseError);
  EXPECT_THROW(parse_process("0.5 0\n0.5 0\n"), ValidationError);
  EXPECT_THROW(parse_process("0.5 3\n", 2), ParseError);
  EXPECT_EQ(parse_process("0.5 0\n", 4).n(), 4u);
  const GeneratingProcess back = parse_process(format_process(proc));
  ASSERT_EQ(back.size(), proc.size());
  for (std::size_t k = 0; k < proc.size(); ++k) {
    EXPECT_EQ(back.sets()[k].set, proc.sets()[k].set);
    EXPECT_EQ(back.sets()[k].weight, proc.sets()[k].weight);
  }
}

TEST(Sample, FileRoundTrip) {
  Sample s;
  s.steps = {{NodeSet{0}}, {}, {NodeSet{0, 1}, NodeSet{1}, NodeSet{1}}};
  EXPECT_EQ(s.occurrences(), 4u);
  const std::string text = format_sample(s);
  EXPECT_EQ(text, "0: 0\n1:\n2: 0 1 | 1 | 1\n");
  const Sample back = parse_sample(text);
  EXPECT_EQ(back.steps, s.steps);
  EXPECT_EQ(sample_node_bound(back), 2u);
  EXPECT_THROW(parse_sample("0: 1\n2: 1\n"), ParseError);
  EXPECT_THROW(parse_sample("0: 1 | | 2\n"), ParseError);
}

TEST(CostParams, Validation) {
  EXPECT_NO_THROW(CostParams(0.75, 3));
  EXPECT_THROW(CostParams(1.0, 1), ValidationError);
  EXPECT_THROW(CostParams(0.0, 1), ValidationError);
  EXPECT_THROW(CostParams(0.5, 0), ValidationError);
}

TEST(Permutation, Check) {
  EXPECT_NO_THROW(check_permutation(std::vector<NodeId>{1, 0, 2}, 3));
  EXPECT_THROW(check_permutation(std::vector<NodeId>{1, 1, 2}, 3), ValidationError);
  EXPECT_THROW(check_permutation(std::vector<NodeId>{0, 1}, 3), DimensionError);
}

TEST(Format, DoublesRoundTrip) {
  CounterRng rng(9);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.uniform() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    EXPECT_EQ(parse_double(format_double(x), 0), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}
