#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rout/bfs.hpp"
#include "rout/flags.hpp"
#include "rout/scc.hpp"
#include "rout/stationary.hpp"

using namespace rout;

namespace {

// n=4096, r=2: a complete binary in-tree of depth 9 on vertices 0..1022
// (heap layout, parent of i is (i-1)/2) hanging off vertex 0.
Digraph heap_flag_fixture(std::uint64_t seed) {
  const std::uint32_t n = 4096;
  Rng rng(Seed{seed});
  std::vector<Vertex> heads(n * 2);
  for (Vertex u = 0; u < n; ++u) {
    if (u == 0) {
      heads[0] = 1023 + static_cast<Vertex>(rng.below(n - 1023));
      heads[1] = 1023 + static_cast<Vertex>(rng.below(n - 1023));
    } else if (u < 1023) {
      heads[2 * u] = (u - 1) / 2;
      heads[2 * u + 1] = 1023 + static_cast<Vertex>(rng.below(n - 1023));
    } else {
      heads[2 * u] = 511 + static_cast<Vertex>(rng.below(n - 511));
      heads[2 * u + 1] = 511 + static_cast<Vertex>(rng.below(n - 511));
    }
  }
  return Digraph(n, 2, heads);
}

}  // namespace

TEST(FlagParams, KStarAndDefaults) {
  const auto p = make_flag_params(4096, 2);
  EXPECT_EQ(p.k_star, 9u);  // ceil((0.7697 - 0.1) * 12)
  EXPECT_EQ(p.threshold, default_in_threshold(4096));
  EXPECT_EQ(p.size_cap, default_size_cap(4096));
  EXPECT_EQ(make_flag_params(65536, 2).k_star, 11u);
  EXPECT_EQ(make_flag_params(1000, 3, 0.2, 7, 9).threshold, 7u);
}

TEST(FlagParams, RejectsBadInput) {
  EXPECT_THROW(make_flag_params(4096, 2, 0.0), ParameterError);
  EXPECT_THROW(make_flag_params(4096, 2, -1.0), ParameterError);
  EXPECT_THROW(make_flag_params(1, 2), ParameterError);
  EXPECT_THROW(make_flag_params(4096, 2, 1.6), ParameterError);  // k_star < 1
  EXPECT_THROW(make_flag_params(4096, 1), ParameterError);
  EXPECT_THROW(make_flag_params(4096, 2, 0.2, 0), ParameterError);
}

TEST(IsFlag, VertexWithoutInEdgesIsNotAFlag) {
  const Digraph g(3, 2, {1, 1, 0, 0, 0, 1});
  const auto p = make_flag_params(3, 2, 0.2, 2, 100);
  const auto rep = is_flag(g, 2, p);
  EXPECT_FALSE(rep.is_flag);
  EXPECT_FALSE(rep.k1.has_value());
  EXPECT_EQ(rep.maze_size, 1u);
}

TEST(IsFlag, AllLoopsHasNoFlags) {
  const auto g = all_loops_graph(50, 2);
  const auto p = make_flag_params(50, 2, 0.2, 1, 100);
  for (Vertex v = 0; v < 50; ++v) {
    const auto rep = is_flag(g, v, p);
    EXPECT_FALSE(rep.is_flag);
    EXPECT_FALSE(rep.is_tree);  // the loop is an induced edge on {v}
  }
  EXPECT_TRUE(find_flags(g, p).empty());
}

TEST(IsFlag, HeapFixtureIsAFlagWithHardnessK1) {
  const auto g = heap_flag_fixture(1);
  const auto p = make_flag_params(4096, 2, 0.2, 512);
  const auto dec = scc_decompose(g);
  const auto rep = is_flag(g, 0, p, &dec);
  ASSERT_TRUE(rep.is_flag);
  EXPECT_EQ(*rep.k1, 9u);
  EXPECT_EQ(rep.maze_size, 1023u);
  EXPECT_TRUE(rep.is_tree);
  EXPECT_EQ(maze_hardness(g, 0, *rep.k1).h, *rep.k1);

  const auto flags = find_flags(g, p, &dec);
  ASSERT_FALSE(flags.empty());
  EXPECT_EQ(flags.front().vertex, 0u);
  EXPECT_EQ(flags.front().k1, rep.k1);
  EXPECT_EQ(flags.front().maze_size, rep.maze_size);

  ASSERT_TRUE(dec.attractive);
  ASSERT_TRUE(dec.in_d0(0));
  const auto prof = stationary_power(g, dec);
  const auto chk = validate_flag_linkage(g, prof, 0, *rep.k1);
  EXPECT_EQ(chk.entrance, 512u);
  EXPECT_TRUE(chk.ok);
  // the same path count bound at every intermediate depth
  for (std::uint32_t k = 1; k <= 9; ++k) EXPECT_TRUE(validate_flag_linkage(g, prof, 0, k).ok) << k;
}

TEST(IsFlag, ExtraEdgeBreaksTheTree) {
  auto g = heap_flag_fixture(2);
  std::vector<Vertex> heads(g.heads().begin(), g.heads().end());
  heads[2 * 700 + 1] = 5;  // a second edge from a layer-9 vertex into the maze
  const Digraph h(4096, 2, heads);
  const auto p = make_flag_params(4096, 2, 0.2, 512);
  const auto rep = is_flag(h, 0, p);
  EXPECT_FALSE(rep.is_tree);
  EXPECT_FALSE(rep.is_flag);
  const auto flags = find_flags(h, p);
  EXPECT_TRUE(flags.empty() || flags.front().vertex != 0);
}

TEST(IsFlag, SizeCapAndKStarAreEnforced) {
  const auto g = heap_flag_fixture(3);
  EXPECT_FALSE(is_flag(g, 0, make_flag_params(4096, 2, 0.2, 512, 1022)).is_flag);
  EXPECT_TRUE(is_flag(g, 0, make_flag_params(4096, 2, 0.2, 512, 1023)).is_flag);
  // threshold 256 is reached at depth 8 < k_star
  const auto early = is_flag(g, 0, make_flag_params(4096, 2, 0.2, 256));
  EXPECT_EQ(early.k1, 8u);
  EXPECT_FALSE(early.is_flag);
}

TEST(FindFlags, MatchesBruteForceScan) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const std::uint32_t n = 3000;
    const auto g = generate(n, 2, Seed{s + 600});
    const auto dec = scc_decompose(g);
    for (double eps : {0.2, 0.8, 1.2}) {
      for (std::uint64_t t : {2ull, 5ull, 12ull, 40ull}) {
        const auto p = make_flag_params(n, 2, eps, t);
        std::vector<Vertex> brute;
        for (Vertex v = 0; v < n; ++v)
          if (is_flag(g, v, p, &dec).is_flag) brute.push_back(v);
        const auto fast = find_flags(g, p, &dec, 1 + s % 3);
        std::vector<Vertex> got;
        for (const auto& f : fast) {
          got.push_back(f.vertex);
          const auto full = is_flag(g, f.vertex, p, &dec);
          EXPECT_EQ(f.k1, full.k1);
          EXPECT_EQ(f.maze_size, full.maze_size);
          EXPECT_EQ(f.in_d0, full.in_d0);
        }
        EXPECT_EQ(got, brute) << "eps=" << eps << " t=" << t;
      }
    }
  }
}

TEST(FindFlags, K1EqualsK0ForReachingVertices) {
  const auto g = generate(5000, 2, Seed{4});
  const auto p = make_flag_params(5000, 2, 0.2, 30);
  for (Vertex v = 0; v < 500; ++v) {
    const auto rep = is_flag(g, v, p);
    if (rep.k1) EXPECT_EQ(*rep.k1, k0(g, v, p.threshold));
    else EXPECT_FALSE(k1(g, v, p.threshold).has_value());
  }
}

TEST(FindFlags, CsvFormatIsOneBased) {
  const auto g = heap_flag_fixture(1);
  const auto flags = find_flags(g, make_flag_params(4096, 2, 0.2, 512));
  std::ostringstream os;
  write_flags_csv_header(os);
  write_flags_csv(os, 4096, 2, 1, {flags.front()});
  EXPECT_EQ(os.str(), "n,r,seed,vertex,k1,maze_size,is_tree,is_flag\n4096,2,1,1,9,1023,1,1\n");
}

TEST(FindFlags, DeskScaleFlagsSitInD0) {
  std::uint64_t flags = 0, in_d0 = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::uint32_t n = 20000;
    const auto g = generate(n, 2, derive_seed(Seed{77}, {s}));
    const auto dec = scc_decompose(g);
    for (const auto& f : find_flags(g, make_flag_params(n, 2, 0.6, 16), &dec)) {
      ++flags;
      in_d0 += f.in_d0;
    }
  }
  ASSERT_GT(flags, 20u);
  EXPECT_GE(double(in_d0) / double(flags), 0.95);
}
