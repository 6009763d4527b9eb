#include <gtest/gtest.h>

#include <random>

#include "herring/scc.hpp"

using namespace herring;

namespace {

// Transitive closure by repeated squaring, then the canonical source-first order.
std::vector<std::vector<std::uint32_t>> brute(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (std::size_t u = 0; u < n; ++u) {
    r[u][u] = 1;
    for (auto v : adj[u]) r[u][v] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = 1;
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<char> done(n, 0);
  for (std::uint32_t u = 0; u < n; ++u) {
    if (done[u]) continue;
    std::vector<std::uint32_t> c;
    for (std::uint32_t v = 0; v < n; ++v)
      if (r[u][v] && r[v][u]) {
        c.push_back(v);
        done[v] = 1;
      }
    comps.push_back(c);
  }
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<char> placed(comps.size(), 0);
  while (out.size() < comps.size()) {
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (placed[c]) continue;
      bool source = true;
      for (std::size_t d = 0; d < comps.size(); ++d)
        if (!placed[d] && d != c && r[comps[d][0]][comps[c][0]]) source = false;
      if (source) {
        placed[c] = 1;
        out.push_back(comps[c]);
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST(Tarjan, Chain) {
  Adjacency g{{1}, {2}, {}};
  auto s = tarjan_scc(g);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], std::vector<std::uint32_t>{0});
  EXPECT_EQ(s[2], std::vector<std::uint32_t>{2});
}

TEST(Tarjan, CycleIsOneComponent) {
  Adjacency g{{1}, {2}, {0}};
  auto s = tarjan_scc(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(Tarjan, IndependentVerticesAscend) {
  Adjacency g{{}, {}, {}};
  auto s = tarjan_scc(g);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0][0], 0u);
  EXPECT_EQ(s[1][0], 1u);
}

TEST(Tarjan, MatchesBruteForceOnRandomGraphs) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 30;
    double p = (rng() % 100) / 400.0;
    Adjacency g(n);
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = 0; v < n; ++v)
        if (u != v && std::uniform_real_distribution<>(0, 1)(rng) < p) g[u].push_back(v);
    ASSERT_EQ(tarjan_scc(g), brute(g)) << "trial " << trial;
  }
}

TEST(Tarjan, RandomTournaments) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t n = 30;
    Adjacency g(n);
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v) {
        if (rng() % 3)
          g[u].push_back(v);
        else
          g[v].push_back(u);
      }
    ASSERT_EQ(tarjan_scc(g), brute(g));
  }
}

TEST(Tarjan, DeepPathDoesNotRecurse) {
  const std::uint32_t n = 200000;
  Adjacency g(n);
  for (std::uint32_t u = 0; u + 1 < n; ++u) g[u].push_back(u + 1);
  g[n - 1].push_back(0);
  auto s = tarjan_scc(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].size(), n);
}
