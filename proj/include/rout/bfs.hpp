#pragma once

// Outward (tail -> head) and inward (head -> tail) breadth-first search.
//
// Exploration follows the FIFO discipline: the vertex at the front of the
// queue is explored, and its not-yet-seen neighbours are appended in
// increasing vertex order. Parallel edges are collapsed, so layers are the
// vertex sets N_k at exact distance k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rout/digraph.hpp"

namespace rout {

enum class Direction { outward, inward };

inline const char* to_string(Direction d) { return d == Direction::outward ? "outward" : "inward"; }

constexpr std::uint32_t kInfDistance = std::numeric_limits<std::uint32_t>::max();
constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

struct BfsResult {
  Vertex root = 0;
  Direction direction = Direction::outward;
  std::vector<std::uint32_t> dist;         // kInfDistance when not reached
  std::vector<std::vector<Vertex>> layers;  // layers[k] = vertices at distance k, discovery order
  std::vector<Vertex> parent;              // kNoVertex for the root and unreached vertices
  std::vector<Vertex> order;               // discovery sequence

  std::uint32_t depth() const { return static_cast<std::uint32_t>(layers.size()) - 1; }
  bool reached(Vertex u) const { return dist[u] != kInfDistance; }
};

namespace detail {

// Distinct neighbours of u in increasing order, written into buf.
inline void sorted_neighbours(const Digraph& g, Vertex u, Direction dir, std::vector<Vertex>& buf) {
  buf.clear();
  if (dir == Direction::outward) {
    auto out = g.out(u);
    buf.assign(out.begin(), out.end());
    std::sort(buf.begin(), buf.end());
  } else {
    auto in = g.in(u);
    buf.assign(in.begin(), in.end());  // already ascending
  }
  buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
}

}  // namespace detail

inline BfsResult bfs(const Digraph& g, Vertex root, Direction dir,
                     std::optional<std::uint32_t> max_depth = std::nullopt) {
  if (root >= g.n()) throw ParameterError("bfs root " + std::to_string(root) + " is not a vertex");
  BfsResult res;
  res.root = root;
  res.direction = dir;
  res.dist.assign(g.n(), kInfDistance);
  res.parent.assign(g.n(), kNoVertex);
  res.dist[root] = 0;
  res.order.push_back(root);
  res.layers.push_back({root});
  std::vector<Vertex> nbrs;
  std::size_t head = 0;
  const std::uint32_t limit = max_depth.value_or(kInfDistance);
  while (head < res.order.size()) {
    const Vertex u = res.order[head++];
    const std::uint32_t du = res.dist[u];
    if (du >= limit) continue;
    detail::sorted_neighbours(g, u, dir, nbrs);
    for (Vertex w : nbrs) {
      if (res.dist[w] != kInfDistance) continue;
      res.dist[w] = du + 1;
      res.parent[w] = u;
      res.order.push_back(w);
      if (res.layers.size() <= du + 1) res.layers.emplace_back();
      res.layers[du + 1].push_back(w);
    }
  }
  return res;
}

/// dist(u) = dist_D(v, u).
inline BfsResult obfs(const Digraph& g, Vertex v, std::optional<std::uint32_t> max_depth = std::nullopt) {
  return bfs(g, v, Direction::outward, max_depth);
}

/// dist(u) = dist_D(u, v).
inline BfsResult ibfs(const Digraph& g, Vertex v, std::optional<std::uint32_t> max_depth = std::nullopt) {
  return bfs(g, v, Direction::inward, max_depth);
}

/// Produces in-layer sizes d_0^-, d_1^-, ... one layer at a time, so callers
/// can stop as soon as a threshold is met without exploring the whole
/// in-component.
class InLayerWalker {
 public:
  InLayerWalker(const Digraph& g, Vertex v) : g_(g), seen_(g.n(), 0), current_{v} {
    if (v >= g.n()) throw ParameterError("root " + std::to_string(v) + " is not a vertex");
    seen_[v] = 1;
  }

  std::size_t size() const { return current_.size(); }
  std::uint32_t depth() const { return depth_; }
  const std::vector<Vertex>& layer() const { return current_; }

  /// Advances to the next layer and returns its size.
  std::size_t advance() {
    std::vector<Vertex> next;
    for (Vertex u : current_) {
      for (Vertex w : g_.in(u)) {
        if (!seen_[w]) {
          seen_[w] = 1;
          next.push_back(w);
        }
      }
    }
    current_ = std::move(next);
    ++depth_;
    return current_.size();
  }

 private:
  const Digraph& g_;
  std::vector<std::uint8_t> seen_;
  std::vector<Vertex> current_;
  std::uint32_t depth_ = 0;
};

/// min{k : d_k^-(v) = 0 or d_k^-(v) >= threshold}.
inline std::uint32_t k0(const Digraph& g, Vertex v, std::uint64_t threshold) {
  if (threshold == 0) throw ParameterError("k0 threshold must be >= 1");
  InLayerWalker walk(g, v);
  while (walk.size() != 0 && walk.size() < threshold) walk.advance();
  return walk.depth();
}

/// min{k : d_k^-(v) >= threshold}, or nullopt when the in-layers die out first.
inline std::optional<std::uint32_t> k1(const Digraph& g, Vertex v, std::uint64_t threshold) {
  if (threshold == 0) throw ParameterError("k1 threshold must be >= 1");
  InLayerWalker walk(g, v);
  while (walk.size() != 0 && walk.size() < threshold) walk.advance();
  if (walk.size() == 0) return std::nullopt;
  return walk.depth();
}

/// Default thresholds ceil(ln^4 n) and ceil(ln^7 n), at least 1.
inline std::uint64_t default_in_threshold(std::uint64_t n) {
  const double l = std::log(static_cast<double>(n));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(l, 4))));
}
inline std::uint64_t default_size_cap(std::uint64_t n) {
  const double l = std::log(static_cast<double>(n));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::pow(l, 7))));
}

struct GrowthProfile {
  Vertex root = 0;
  std::vector<std::uint64_t> sizes;       // d_0^-, ..., d_K^-
  std::vector<std::uint64_t> cumulative;  // d_{<=k}^-
};

inline GrowthProfile in_growth_profile(const Digraph& g, Vertex v, std::uint32_t kmax) {
  GrowthProfile p;
  p.root = v;
  InLayerWalker walk(g, v);
  std::uint64_t total = 0;
  for (std::uint32_t k = 0; k <= kmax; ++k) {
    if (k > 0) walk.advance();
    total += walk.size();
    p.sizes.push_back(walk.size());
    p.cumulative.push_back(total);
  }
  return p;
}

inline nlohmann::json to_json(const BfsResult& b) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : b.layers) {
    nlohmann::json row = nlohmann::json::array();
    for (Vertex u : layer) row.push_back(u + 1);
    layers.push_back(std::move(row));
  }
  return {{"root", b.root + 1}, {"direction", to_string(b.direction)}, {"layers", std::move(layers)}};
}

/// CSV rows `k,d_k,cum_k` with a header line.
inline void write_csv(std::ostream& os, const GrowthProfile& p) {
  os << "k,d_k,cum_k\n";
  for (std::size_t k = 0; k < p.sizes.size(); ++k) os << k << ',' << p.sizes[k] << ',' << p.cumulative[k] << '\n';
}

/// Human-facing distance: 1-based callers never see the sentinel, only "inf".
inline std::string format_distance(std::uint32_t d) { return d == kInfDistance ? "inf" : std::to_string(d); }

}  // namespace rout
