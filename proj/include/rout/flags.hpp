#pragma once

// epsilon-flags: vertices whose in-neighbourhood stays a thin tree up to the
// depth k1 where it finally reaches the threshold size, with k1 >= k_star.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "rout/bfs.hpp"
#include "rout/branching.hpp"
#include "rout/digraph.hpp"
#include "rout/error.hpp"
#include "rout/rng.hpp"
#include "rout/scc.hpp"

namespace rout {

struct FlagParams {
  double epsilon = 0.2;
  std::uint32_t k_star = 0;      // ceil((eta_r - epsilon/2) log_r n)
  std::uint64_t threshold = 0;   // ceil(ln^4 n) unless overridden
  std::uint64_t size_cap = 0;    // ceil(ln^7 n) unless overridden
};

constexpr double kDefaultEpsilon = 0.2;

inline FlagParams make_flag_params(std::uint32_t n, std::uint32_t r, double epsilon = kDefaultEpsilon,
                                   std::optional<std::uint64_t> threshold = std::nullopt,
                                   std::optional<std::uint64_t> size_cap = std::nullopt) {
  if (!(epsilon > 0.0)) throw ParameterError("flag epsilon must be positive");
  if (n < 2) throw ParameterError("flag parameters need n >= 2");
  const auto c = solve_constants(r);
  const double ks = std::ceil((c.eta - epsilon / 2.0) * std::log(static_cast<double>(n)) / std::log(static_cast<double>(r)));
  if (ks < 1.0) {
    throw ParameterError("epsilon=" + std::to_string(epsilon) + " too large: k_star would be < 1");
  }
  FlagParams p;
  p.epsilon = epsilon;
  p.k_star = static_cast<std::uint32_t>(ks);
  p.threshold = threshold.value_or(default_in_threshold(n));
  p.size_cap = size_cap.value_or(default_size_cap(n));
  if (p.threshold == 0) throw ParameterError("flag threshold must be >= 1");
  if (p.size_cap == 0) throw ParameterError("flag size cap must be >= 1");
  return p;
}

struct FlagReport {
  Vertex vertex = 0;
  bool is_flag = false;
  std::optional<std::uint32_t> k1;
  std::uint64_t maze_size = 0;  // |N_{<=k1}^-(v)|; the whole in-ball reached when k1 is none
  bool is_tree = false;         // induced edges on the maze, multiplicity counted, equal maze_size - 1
  bool in_d0 = false;
};

/// Full definition check. dec is optional; without it in_d0 is computed from
/// a fresh decomposition.
inline FlagReport is_flag(const Digraph& g, Vertex v, const FlagParams& p, const SccDecomposition* dec = nullptr) {
  if (v >= g.n()) throw ParameterError("is_flag: " + std::to_string(v) + " is not a vertex");
  FlagReport rep;
  rep.vertex = v;
  InLayerWalker walk(g, v);
  std::vector<Vertex> maze{v};
  while (walk.size() != 0 && walk.size() < p.threshold) {
    walk.advance();
    maze.insert(maze.end(), walk.layer().begin(), walk.layer().end());
  }
  if (walk.size() != 0) rep.k1 = walk.depth();
  rep.maze_size = maze.size();
  std::vector<std::uint8_t> member(g.n(), 0);
  for (Vertex u : maze) member[u] = 1;
  std::uint64_t edges = 0;
  for (Vertex u : maze) {
    for (Vertex h : g.out(u)) edges += member[h];
  }
  rep.is_tree = edges + 1 == maze.size();
  rep.is_flag = rep.k1 && *rep.k1 >= p.k_star && rep.maze_size <= p.size_cap && rep.is_tree;
  if (dec) {
    rep.in_d0 = dec->in_d0(v);
  } else {
    rep.in_d0 = scc_decompose(g).in_d0(v);
  }
  return rep;
}

namespace detail {

// Scratch space for repeated flag scans; stamps avoid clearing per vertex.
struct FlagScanner {
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::vector<Vertex> layer, next;

  explicit FlagScanner(std::uint32_t n) : stamp(n, 0) {}

  // Same verdict as is_flag(...).is_flag, but gives up as soon as the answer
  // is known: an edge outside the search tree, a layer reaching the
  // threshold before depth k_star, the layers dying out, or the size cap.
  std::optional<FlagReport> scan(const Digraph& g, Vertex v, const FlagParams& p) {
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    stamp[v] = epoch;
    layer.assign(1, v);
    std::uint64_t size = 1;
    std::uint32_t depth = 0;
    while (layer.size() < p.threshold) {
      next.clear();
      for (Vertex u : layer) {
        for (Vertex w : g.in(u)) {
          if (stamp[w] == epoch) return std::nullopt;  // loop, parallel edge or cross edge
          stamp[w] = epoch;
          next.push_back(w);
        }
      }
      if (next.empty()) return std::nullopt;
      ++depth;
      size += next.size();
      if (size > p.size_cap) return std::nullopt;
      if (next.size() >= p.threshold && depth < p.k_star) return std::nullopt;
      layer.swap(next);
    }
    // Edges from the maze into the entrance layer.
    for (Vertex u : layer) {
      for (Vertex w : g.in(u)) {
        if (stamp[w] == epoch) return std::nullopt;
      }
    }
    if (depth < p.k_star) return std::nullopt;
    FlagReport rep;
    rep.vertex = v;
    rep.is_flag = true;
    rep.k1 = depth;
    rep.maze_size = size;
    rep.is_tree = true;
    return rep;
  }
};

}  // namespace detail

/// All flags of g in increasing vertex order.
inline std::vector<FlagReport> find_flags(const Digraph& g, const FlagParams& p, const SccDecomposition* dec = nullptr,
                                          unsigned workers = 1) {
  const std::uint32_t n = g.n();
  (void)g.in(0);  // build the reverse index before threads share it
  workers = std::max(1u, workers);
  std::vector<std::vector<FlagReport>> found(workers);
  std::atomic<std::uint32_t> next{0};
  constexpr std::uint32_t kChunk = 1024;
  auto work = [&](unsigned id) {
    detail::FlagScanner sc(n);
    for (;;) {
      const std::uint32_t lo = next.fetch_add(kChunk);
      if (lo >= n) break;
      const std::uint32_t hi = std::min(n, lo + kChunk);
      for (Vertex v = lo; v < hi; ++v) {
        if (auto rep = sc.scan(g, v, p)) found[id].push_back(*rep);
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work, i);
    for (auto& t : pool) t.join();
  }
  std::vector<FlagReport> all;
  for (auto& f : found) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end(), [](const FlagReport& a, const FlagReport& b) { return a.vertex < b.vertex; });
  if (!all.empty()) {
    const SccDecomposition own = dec ? SccDecomposition{} : scc_decompose(g);
    const SccDecomposition& d = dec ? *dec : own;
    for (auto& f : all) f.in_d0 = d.in_d0(f.vertex);
  }
  return all;
}

inline void write_flags_csv_header(std::ostream& os) { os << "n,r,seed,vertex,k1,maze_size,is_tree,is_flag\n"; }

inline void write_flags_csv(std::ostream& os, std::uint32_t n, std::uint32_t r, std::uint64_t seed,
                            const std::vector<FlagReport>& reports) {
  for (const auto& f : reports) {
    os << n << ',' << r << ',' << seed << ',' << f.vertex + 1 << ',' << (f.k1 ? std::to_string(*f.k1) : "") << ','
       << f.maze_size << ',' << (f.is_tree ? 1 : 0) << ',' << (f.is_flag ? 1 : 0) << '\n';
  }
}

}  // namespace rout
