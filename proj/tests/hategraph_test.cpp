#include <gtest/gtest.h>

#include <numeric>

#include "hsd/error.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/random.hpp"
#include "oracles.hpp"

using namespace hsd;

namespace {

std::string vid(int i) { return "v" + std::to_string(100 + i); }

}  // namespace

TEST(FollowGraph, Build) {
  EXPECT_EQ(FollowGraph::build({}).num_vertices(), 0u);
  const auto dup = FollowGraph::build({{"a", "b"}, {"a", "b"}});
  EXPECT_EQ(dup.num_vertices(), 2u);
  EXPECT_EQ(dup.num_edges(), 1u);
  const auto both = FollowGraph::build({{"a", "b"}, {"b", "a"}});
  EXPECT_EQ(both.num_edges(), 2u);
  EXPECT_EQ(FollowGraph::build({{"a", "a"}}).num_edges(), 1u);
}

TEST(PageRank, TwoCycle) {
  const auto g = FollowGraph::build({{"a", "b"}, {"b", "a"}});
  const auto r = pagerank(g).by_account(g);
  EXPECT_NEAR(r.at("a"), 0.5, 1e-12);
  EXPECT_NEAR(r.at("b"), 0.5, 1e-12);
}

TEST(PageRank, StarMatchesOracle) {
  const auto g = FollowGraph::build({{"b", "a"}, {"c", "a"}});
  const auto r = pagerank(g, {0.85, 1e-12, 1000});
  const auto expected = oracle::pagerank(3, {{1, 0}, {2, 0}}, 0.85);
  for (int v = 0; v < 3; ++v) EXPECT_NEAR(r.scores[static_cast<std::size_t>(v)], expected[static_cast<std::size_t>(v)], 1e-8);
}

TEST(PageRank, SingleVertex) {
  const auto g = FollowGraph::build({{"a", "a"}});
  EXPECT_NEAR(pagerank(g).scores[0], 1.0, 1e-12);
}

TEST(PageRank, Errors) {
  EXPECT_THROW(pagerank(FollowGraph::build({})), Error);
  const auto g = FollowGraph::build({{"a", "b"}});
  EXPECT_THROW(pagerank(g, {0.0, 1e-10, 10}), Error);
  EXPECT_THROW(pagerank(g, {1.0, 1e-10, 10}), Error);
}

TEST(PageRank, PropertiesOnRandomGraphs) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.between(2, 25);
    std::vector<Edge> edges;
    for (int e = 0; e < n * 2; ++e) edges.emplace_back(vid(rng.between(0, n - 1)), vid(rng.between(0, n - 1)));
    const auto g = FollowGraph::build(edges);
    PageRankOptions opt{0.85, 1e-10, 7};
    const auto r = pagerank(g, opt);
    EXPECT_LE(r.iterations, opt.max_iter);
    EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-9);
    for (const double s : r.scores) EXPECT_GE(s, 0.0);
  }
}

TEST(SelectHateAccounts, AllVertices) {
  const auto g = FollowGraph::build({{"a", "b"}, {"b", "c"}, {"c", "a"}, {"d", "a"}});
  EXPECT_EQ(select_hate_accounts(g, {}, 4).size(), 4u);
}

TEST(SelectHateAccounts, TopTwoWithoutSeeds) {
  const std::vector<Edge> edges{{"a", "b"}, {"c", "b"}, {"b", "c"}};
  const auto g = FollowGraph::build(edges);
  const auto expected = oracle::pagerank(3, {{0, 1}, {2, 1}, {1, 2}}, 0.85);
  std::vector<int> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return expected[static_cast<std::size_t>(x)] > expected[static_cast<std::size_t>(y)]; });
  const auto set = select_hate_accounts(g, {}, 2);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.accounts()[0], g.id(order[0]));
  EXPECT_EQ(set.accounts()[1], g.id(order[1]));
}

TEST(SelectHateAccounts, SeedDominatesRank) {
  const auto g = FollowGraph::build({{"a", "b"}, {"c", "b"}, {"b", "c"}});
  const auto set = select_hate_accounts(g, {"a"}, 1);
  EXPECT_EQ(set.accounts(), std::vector<std::string>{"a"});
}

TEST(SelectHateAccounts, Errors) {
  const auto g = FollowGraph::build({{"a", "b"}});
  EXPECT_THROW(select_hate_accounts(g, {"a", "b"}, 1), Error);
  EXPECT_THROW(select_hate_accounts(g, {"zz"}, 2), Error);
}

TEST(SelectHateAccounts, TiesByIdAndSeedInclusive) {
  // Symmetric graph: all scores equal, order must fall back to ids.
  const auto g = FollowGraph::build({{"c", "a"}, {"a", "b"}, {"b", "c"}});
  const auto set = select_hate_accounts(g, {"c"}, 2);
  EXPECT_EQ(set.accounts(), (std::vector<std::string>{"a", "c"}));
}

TEST(ProjectHateGraph, Cases) {
  const std::vector<Edge> edges{{"u1", "h1"}, {"u1", "x"}, {"u2", "h2"}, {"u2", "y"}, {"u3", "z"}};
  const auto g = FollowGraph::build(edges);
  EXPECT_EQ(project_hate_graph(g, HateAccountSet({"q"})).num_edges(), 0u);
  EXPECT_EQ(project_hate_graph(g, HateAccountSet({"h1", "h2", "x", "y", "z"})).edges(), g.edges());
  const auto mixed = project_hate_graph(g, HateAccountSet({"h1", "h2"}));
  EXPECT_EQ(mixed.edges(), (std::vector<Edge>{{"u1", "h1"}, {"u2", "h2"}}));
}

TEST(FollowVector, Cases) {
  const auto g = FollowGraph::build({{"u", "a2"}, {"w", "a1"}, {"w", "a3"}});
  const HateAccountSet accounts({"a1", "a2", "a3"});
  EXPECT_EQ(follow_vector("u", g, accounts).to_string(), "010");
  EXPECT_EQ(follow_vector("a1", g, accounts).to_string(), "000");
  EXPECT_EQ(follow_vector("nobody", g, accounts).to_string(), "000");
  EXPECT_THROW(follow_vector("u", g, HateAccountSet{}), Error);
}

TEST(FollowVector, PopcountMatchesIntersection) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.between(3, 20);
    std::vector<Edge> edges;
    for (int e = 0; e < 3 * n; ++e) edges.emplace_back(vid(rng.between(0, n - 1)), vid(rng.between(0, n - 1)));
    const auto g = FollowGraph::build(edges);
    std::vector<std::string> picked;
    for (int i = 0; i < n; ++i) {
      if (rng.bernoulli(0.4)) picked.push_back(vid(i));
    }
    if (picked.empty()) picked.push_back(vid(0));
    const HateAccountSet accounts(picked);
    for (int i = 0; i < n; ++i) {
      std::set<std::string> following;
      for (const auto& [a, b] : edges) {
        if (a == vid(i)) following.insert(b);
      }
      std::size_t expected = 0;
      for (const auto& p : picked) expected += following.count(p);
      const auto v = follow_vector(vid(i), g, accounts);
      EXPECT_EQ(v.size(), picked.size());
      EXPECT_EQ(v.popcount(), expected);
    }
  }
}

TEST(FileFormats, RoundTrips) {
  const std::vector<Edge> edges{{"a", "b"}, {"c", "d"}};
  EXPECT_EQ(parse_edges(serialize_edges(edges)), edges);
  EXPECT_EQ(parse_edges("# comment\na b\n\n c   d \n"), edges);
  EXPECT_THROW(parse_edges("a b\nlonely\n"), ParseError);
  const std::vector<std::string> ids{"x", "y"};
  EXPECT_EQ(parse_id_list(serialize_id_list(ids)), ids);

  const auto g = FollowGraph::build({{"u", "a2"}, {"w", "a1"}});
  const HateAccountSet accounts({"a1", "a2"});
  const auto table = FollowVectorTable::build(g, accounts);
  const auto back = parse_follow_vectors(accounts, serialize_follow_vectors(table));
  EXPECT_EQ(back.lookup("u").to_string(), "01");
  EXPECT_EQ(back.lookup("w").to_string(), "10");
  EXPECT_EQ(back.lookup("missing").to_string(), "00");
}
