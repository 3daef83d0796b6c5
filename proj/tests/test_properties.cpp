// Seeded property checks over many random instances.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "rout/bfs.hpp"
#include "rout/branching.hpp"
#include "rout/dfa.hpp"
#include "rout/diameter.hpp"
#include "rout/digraph_io.hpp"
#include "rout/flags.hpp"
#include "rout/harness.hpp"
#include "rout/scc.hpp"
#include "rout/stationary.hpp"

using namespace rout;

namespace {

struct Instance {
  std::uint32_t n, r;
  Seed seed;
};

std::vector<Instance> instances(std::size_t count, std::uint32_t max_n, std::uint64_t base) {
  Rng rng(Seed{base});
  std::vector<Instance> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto n = static_cast<std::uint32_t>(1 + rng.below(max_n));
    const auto r = static_cast<std::uint32_t>(1 + rng.below(4));
    out.push_back({n, r, Seed{rng()}});
  }
  return out;
}

}  // namespace

TEST(Property, GraphIsOutRegularWithConsistentReverseIndex) {
  for (const auto& in : instances(200, 500, 1)) {
    const auto g = generate(in.n, in.r, in.seed);
    std::uint64_t total = 0;
    for (Vertex v = 0; v < in.n; ++v) {
      total += g.in_degree(v);
      for (Vertex t : g.in(v)) EXPECT_GT(g.multiplicity(t, v), 0u);
    }
    EXPECT_EQ(total, std::uint64_t(in.n) * in.r);
    EXPECT_TRUE(generate(in.n, in.r, in.seed) == g);
  }
}

TEST(Property, TextAndJsonRoundTrip) {
  for (const auto& in : instances(50, 300, 2)) {
    const auto g = generate(in.n, in.r, in.seed);
    std::istringstream text(to_text(g));
    EXPECT_TRUE(read_text(text) == g);
    EXPECT_TRUE(digraph_from_json(nlohmann::json::parse(to_json(g).dump())) == g);
  }
}

TEST(Property, BfsDistancesAreEdgeConsistent) {
  for (const auto& in : instances(100, 400, 3)) {
    const auto g = generate(in.n, in.r, in.seed);
    const Vertex root = static_cast<Vertex>(in.seed.value % in.n);
    const auto o = obfs(g, root);
    const auto i = ibfs(g, root);
    EXPECT_EQ(o.dist[root], 0u);
    for (Vertex u = 0; u < in.n; ++u) {
      for (Vertex w : g.out(u)) {
        if (o.dist[u] != kInfDistance) EXPECT_LE(o.dist[w], o.dist[u] + 1);
        if (i.dist[w] != kInfDistance) EXPECT_LE(i.dist[u], i.dist[w] + 1);
      }
    }
    // layer sizes sum to the reached count
    std::size_t reached = 0;
    for (const auto& l : i.layers) reached += l.size();
    EXPECT_EQ(reached, i.order.size());
  }
}

TEST(Property, SccPartitionAndD0) {
  for (const auto& in : instances(150, 400, 4)) {
    const auto g = generate(in.n, in.r, in.seed);
    const auto dec = scc_decompose(g);
    EXPECT_EQ(std::accumulate(dec.comp_sizes.begin(), dec.comp_sizes.end(), std::uint64_t{0}), in.n);
    for (auto s : dec.comp_sizes) EXPECT_LE(s, dec.d0_size());
    EXPECT_TRUE(std::is_sorted(dec.d0_vertices.begin(), dec.d0_vertices.end()));
    if (dec.attractive) EXPECT_TRUE(is_closed(g, dec));
    EXPECT_GE(dec.period, 1u);
    EXPECT_LE(dec.period, dec.d0_size());
    // D0 is strongly connected: from its first vertex, outward and inward searches cover it
    const auto o = obfs(g, dec.d0_vertices.front());
    const auto i = ibfs(g, dec.d0_vertices.front());
    for (Vertex v : dec.d0_vertices) {
      EXPECT_TRUE(o.reached(v));
      EXPECT_TRUE(i.reached(v));
    }
  }
}

TEST(Property, DiameterOrdering) {
  for (const auto& in : instances(40, 300, 5)) {
    const auto g = generate(in.n, in.r, in.seed);
    const auto dec = scc_decompose(g);
    const auto full = diameter(g);
    EXPECT_GE(full.value, diameter_restricted(g, dec.d0_vertices).value);
    EXPECT_EQ(sample_distance(g, full.witness.first, full.witness.second), full.value);
    // strongly connected D0 of size m needs 1 + r + ... + r^d >= m
    const auto d0 = diameter_restricted(g, dec.d0_vertices).value;
    double ball = 0;
    for (std::uint32_t j = 0; j <= d0; ++j) ball += std::pow(double(in.r), j);
    EXPECT_GE(ball, double(dec.d0_size()));
  }
}

TEST(Property, StationaryIsAProbabilityFixedPoint) {
  for (const auto& in : instances(60, 400, 6)) {
    if (in.r < 2) continue;
    const auto g = generate(in.n, in.r, in.seed);
    const auto dec = scc_decompose(g);
    if (!is_closed(g, dec)) {
      EXPECT_THROW(stationary_power(g, dec), StructureError);
      continue;
    }
    const auto p = stationary_power(g, dec);
    EXPECT_TRUE(p.converged);
    EXPECT_LE(p.residual, 1e-10);
    EXPECT_NEAR(std::accumulate(p.pi.begin(), p.pi.end(), 0.0), 1.0, 1e-12);
    EXPECT_GE(p.pi_min, 0.0);
    EXPECT_GE(p.pi_max, 1.0 / dec.d0_size() - 1e-15);
    EXPECT_GE(p.pi_max, 1.0 / in.n);
    EXPECT_TRUE(validate_pimin_bound(p, diameter_restricted(g, dec.d0_vertices).value, in.r).ok);
  }
}

TEST(Property, HardnessAndEscapeAreBounded) {
  for (const auto& in : instances(60, 300, 7)) {
    const auto g = generate(in.n, in.r, in.seed);
    for (Vertex v = 0; v < std::min<Vertex>(in.n, 10); ++v) {
      for (std::uint32_t k = 0; k <= 4; ++k) {
        const auto mz = build_maze(g, v, k);
        const auto e = escape_probability(g, v, k);
        EXPECT_GE(e.value, 0.0);
        EXPECT_LE(e.value, 1.0);
        if (mz.entrance.empty()) continue;
        const auto h = maze_hardness(g, v, k);
        EXPECT_LE(h.h, k + 1);
        EXPECT_LE(h.h, h.single_exit.size());
        EXPECT_GE(h.witness.size(), k + 1);
      }
    }
  }
}

TEST(Property, FlagsAreTreesWithExactHardnessAndLinkage) {
  std::uint64_t seen = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const std::uint32_t n = 5000;
    const auto g = generate(n, 2, derive_seed(Seed{8}, {s}));
    const auto dec = scc_decompose(g);
    if (!dec.attractive) continue;
    const auto p = make_flag_params(n, 2, 0.8, 10);
    const auto flags = find_flags(g, p, &dec);
    if (flags.empty()) continue;
    const auto prof = stationary_power(g, dec);
    for (const auto& f : flags) {
      ++seen;
      ASSERT_TRUE(f.k1.has_value());
      EXPECT_GE(*f.k1, p.k_star);
      EXPECT_TRUE(f.is_tree);
      EXPECT_LE(f.maze_size, p.size_cap);
      EXPECT_EQ(maze_hardness(g, f.vertex, *f.k1).h, *f.k1);
      EXPECT_TRUE(validate_flag_linkage(g, prof, f.vertex, *f.k1).ok);
      EXPECT_TRUE(validate_flag_linkage(g, prof, f.vertex, p.k_star).ok);
    }
  }
  EXPECT_GT(seen, 0u);
}

TEST(Property, TailProbabilityIsMonotoneInOmega) {
  for (std::uint32_t r : {2u, 3u}) {
    for (std::uint32_t k = 0; k <= 8; ++k) {
      double prev = 0;
      for (std::uint64_t omega = 1; omega <= 12; ++omega) {
        const double p = gw_tail_prob_exact(r, k, omega);
        EXPECT_GE(p, prev - 1e-15);
        EXPECT_LE(p, 1.0);
        prev = p;
      }
    }
  }
}

TEST(Property, DfaWalkAndWordAgree) {
  for (const auto& in : instances(100, 200, 9)) {
    const auto d = random_dfa(in.n, in.r, in.seed);
    Rng a(derive_seed(in.seed, {7})), b(derive_seed(in.seed, {7}));
    const auto w = sample_word(in.r, 64, a);
    const auto path = random_walk(d, 64, b);
    EXPECT_EQ(word_trajectory(d, w), path);
    EXPECT_EQ(run_word(d, w).final_state, path.back());
  }
}

TEST(Property, SweepIsReproducible) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SweepConfig cfg;
    cfg.n_values = {50, 120};
    cfg.r_values = {2, 3};
    cfg.trials = 2;
    cfg.seed = seed;
    cfg.measurements = {"scc", "diam", "stationary", "gw"};
    const auto a = emit_string(run_sweep(cfg), "csv");
    cfg.workers = 3;
    EXPECT_EQ(emit_string(run_sweep(cfg), "csv"), a);
  }
}
