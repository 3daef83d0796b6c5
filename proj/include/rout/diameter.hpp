#pragma once

// Exact diameter (maximum finite directed distance) by breadth-first search
// from every source. Sources are processed 64*kWords at a time: each vertex
// carries a bitset of the batch sources that have reached it, and one level
// of all the batch searches advances with word-wide ORs along every edge.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "rout/bfs.hpp"
#include "rout/digraph.hpp"

namespace rout {

struct DiameterReport {
  std::uint32_t value = 0;
  std::pair<Vertex, Vertex> witness{0, 0};    // lexicographically smallest pair at distance value
  std::optional<std::vector<Vertex>> restricted_to;
  double normalized = 0.0;                     // value / log_r n
};

namespace detail {

struct EccCandidate {
  std::uint32_t value = 0;
  Vertex source = kNoVertex;
  Vertex target = kNoVertex;

  // Larger value wins; ties go to the lexicographically smaller pair.
  bool better_than(const EccCandidate& o) const {
    if (value != o.value) return value > o.value;
    return std::pair(source, target) < std::pair(o.source, o.target);
  }
};

constexpr std::size_t kWords = 4;
constexpr std::size_t kBatch = 64 * kWords;

// One multi-source BFS batch. member == nullptr means the whole graph.
inline void ecc_batch(const Digraph& g, const std::vector<std::uint8_t>* member, const std::vector<Vertex>& vertices,
                      std::span<const Vertex> sources, std::vector<std::uint64_t>& visited,
                      std::vector<std::uint64_t>& frontier, std::vector<std::uint64_t>& next, EccCandidate& best) {
  constexpr std::size_t W = kWords;
  const std::uint32_t r = g.r();
  for (Vertex v : vertices) {
    for (std::size_t w = 0; w < W; ++w) {
      visited[v * W + w] = 0;
      frontier[v * W + w] = 0;
      next[v * W + w] = 0;
    }
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    visited[sources[i] * W + i / 64] |= bit;
    frontier[sources[i] * W + i / 64] |= bit;
  }
  EccCandidate zero{0, sources[0], sources[0]};
  if (zero.better_than(best)) best = zero;

  const auto heads = g.heads();
  for (std::uint32_t level = 1;; ++level) {
    for (Vertex u : vertices) {
      const std::uint64_t* f = &frontier[u * W];
      std::uint64_t any = 0;
      for (std::size_t w = 0; w < W; ++w) any |= f[w];
      if (!any) continue;
      const Vertex* out = heads.data() + static_cast<std::size_t>(u) * r;
      for (std::uint32_t j = 0; j < r; ++j) {
        const Vertex h = out[j];
        if (member && !(*member)[h]) continue;
        std::uint64_t* nx = &next[static_cast<std::size_t>(h) * W];
        for (std::size_t w = 0; w < W; ++w) nx[w] |= f[w];
      }
    }
    bool grew = false;
    const bool record = level >= best.value;
    for (Vertex v : vertices) {
      std::uint64_t* nx = &next[v * W];
      std::uint64_t* vis = &visited[v * W];
      std::uint64_t* f = &frontier[v * W];
      std::uint64_t any = 0;
      for (std::size_t w = 0; w < W; ++w) {
        const std::uint64_t fresh = nx[w] & ~vis[w];
        vis[w] |= fresh;
        f[w] = fresh;
        nx[w] = 0;
        any |= fresh;
      }
      if (!any) continue;
      grew = true;
      if (record) {
        std::size_t w = 0;
        while (f[w] == 0) ++w;
        const Vertex s = sources[w * 64 + static_cast<std::size_t>(std::countr_zero(f[w]))];
        const EccCandidate cand{level, s, v};
        if (cand.better_than(best)) best = cand;
      }
    }
    if (!grew) break;
  }
}

inline unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

inline EccCandidate max_eccentricity(const Digraph& g, const std::vector<std::uint8_t>* member,
                                     const std::vector<Vertex>& vertices, unsigned workers) {
  const std::size_t batches = (vertices.size() + kBatch - 1) / kBatch;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(batches, 1))));
  std::atomic<std::size_t> next_batch{0};
  std::vector<EccCandidate> bests(workers);
  auto work = [&](unsigned id) {
    const std::size_t cells = static_cast<std::size_t>(g.n()) * kWords;
    std::vector<std::uint64_t> visited(cells), frontier(cells), next(cells);
    for (;;) {
      const std::size_t b = next_batch.fetch_add(1);
      if (b >= batches) break;
      const std::size_t lo = b * kBatch;
      const std::size_t hi = std::min(vertices.size(), lo + kBatch);
      ecc_batch(g, member, vertices, std::span<const Vertex>(vertices.data() + lo, hi - lo), visited, frontier, next,
                bests[id]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work, i);
    for (auto& t : pool) t.join();
  }
  EccCandidate best = bests[0];
  for (const auto& c : bests) {
    if (c.source != kNoVertex && (best.source == kNoVertex || c.better_than(best))) best = c;
  }
  return best;
}

inline double log_base(double x, double base) { return std::log(x) / std::log(base); }

}  // namespace detail

/// diam(D) = max{dist(u, v) : dist(u, v) < inf}.
inline DiameterReport diameter(const Digraph& g, unsigned workers = detail::default_workers()) {
  std::vector<Vertex> all(g.n());
  for (Vertex v = 0; v < g.n(); ++v) all[v] = v;
  const auto best = detail::max_eccentricity(g, nullptr, all, workers);
  DiameterReport rep;
  rep.value = best.value;
  rep.witness = {best.source, best.target};
  rep.normalized = g.n() > 1 ? best.value / detail::log_base(g.n(), g.r()) : 0.0;
  return rep;
}

/// Diameter of the induced subgraph D[s]: only edges with both ends in s,
/// distances measured inside s.
inline DiameterReport diameter_restricted(const Digraph& g, std::vector<Vertex> s,
                                          unsigned workers = detail::default_workers()) {
  if (s.empty()) throw ParameterError("diameter_restricted: vertex set is empty");
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<std::uint8_t> member(g.n(), 0);
  for (Vertex v : s) {
    if (v >= g.n()) throw ParameterError("diameter_restricted: " + std::to_string(v) + " is not a vertex");
    member[v] = 1;
  }
  const auto best = detail::max_eccentricity(g, &member, s, workers);
  DiameterReport rep;
  rep.value = best.value;
  rep.witness = {best.source, best.target};
  rep.normalized = g.n() > 1 ? best.value / detail::log_base(g.n(), g.r()) : 0.0;
  rep.restricted_to = std::move(s);
  return rep;
}

/// dist(u, v) by a search from u that stops as soon as v is found;
/// kInfDistance when v is unreachable.
inline std::uint32_t sample_distance(const Digraph& g, Vertex u, Vertex v) {
  if (u >= g.n() || v >= g.n()) throw ParameterError("sample_distance: vertex out of range");
  if (u == v) return 0;
  std::vector<std::uint32_t> dist(g.n(), kInfDistance);
  std::vector<Vertex> queue{u};
  dist[u] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Vertex x = queue[i];
    for (Vertex h : g.out(x)) {
      if (dist[h] != kInfDistance) continue;
      dist[h] = dist[x] + 1;
      if (h == v) return dist[h];
      queue.push_back(h);
    }
  }
  return kInfDistance;
}

}  // namespace rout
