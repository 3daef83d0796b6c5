#pragma once

// Strongly connected components, the largest component D0, attractivity and
// the period of D0.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "rout/digraph.hpp"

namespace rout {

struct SccDecomposition {
  std::vector<std::uint32_t> comp_id;     // per vertex; components numbered by smallest member
  std::vector<std::uint64_t> comp_sizes;  // per component
  std::uint32_t d0 = 0;                   // index of D0
  std::vector<Vertex> d0_vertices;        // ascending
  bool attractive = false;
  std::uint64_t period = 0;

  std::uint64_t d0_size() const { return comp_sizes[d0]; }
  bool in_d0(Vertex v) const { return comp_id[v] == d0; }
};

namespace detail {

// Iterative Tarjan. Returns per-vertex component labels in completion order.
inline std::vector<std::uint32_t> tarjan_labels(const Digraph& g, std::uint32_t& count) {
  const std::uint32_t n = g.n();
  const std::uint32_t r = g.r();
  constexpr std::uint32_t kUnvisited = 0xFFFFFFFFu;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), label(n, kUnvisited);
  std::vector<Vertex> stack;
  std::vector<std::uint8_t> on_stack(n, 0);
  struct Frame {
    Vertex v;
    std::uint32_t edge;
  };
  std::vector<Frame> call;
  std::uint32_t next_index = 0;
  count = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (index[s] != kUnvisited) continue;
    call.push_back({s, 0});
    index[s] = low[s] = next_index++;
    stack.push_back(s);
    on_stack[s] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < r) {
        const Vertex w = g.head(f.v, f.edge++);
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const Vertex v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        Vertex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          label[w] = count;
        } while (w != v);
        ++count;
      }
    }
  }
  return label;
}

}  // namespace detail

/// True iff every vertex reaches D0 (reverse search from D0 covers [n]).
inline bool is_attractive(const Digraph& g, const SccDecomposition& dec) {
  std::vector<std::uint8_t> seen(g.n(), 0);
  std::vector<Vertex> queue(dec.d0_vertices);
  for (Vertex v : queue) seen[v] = 1;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (Vertex t : g.in(queue[i])) {
      if (!seen[t]) {
        seen[t] = 1;
        queue.push_back(t);
      }
    }
  }
  return queue.size() == g.n();
}

/// True iff no edge leaves D0.
inline bool is_closed(const Digraph& g, const SccDecomposition& dec) {
  for (Vertex u : dec.d0_vertices) {
    for (Vertex h : g.out(u)) {
      if (!dec.in_d0(h)) return false;
    }
  }
  return true;
}

/// gcd of cycle lengths in D0: gcd over D0 edges (u, w) of
/// level(u) + 1 - level(w), with levels from a BFS inside D0.
inline std::uint64_t period(const Digraph& g, const SccDecomposition& dec) {
  if (dec.d0_vertices.empty()) throw StructureError("period: D0 is empty");
  std::vector<std::int64_t> level(g.n(), -1);
  std::vector<Vertex> queue{dec.d0_vertices.front()};
  level[queue[0]] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Vertex u = queue[i];
    for (Vertex w : g.out(u)) {
      if (dec.in_d0(w) && level[w] < 0) {
        level[w] = level[u] + 1;
        queue.push_back(w);
      }
    }
  }
  std::uint64_t gcd = 0;
  for (Vertex u : dec.d0_vertices) {
    for (Vertex w : g.out(u)) {
      if (!dec.in_d0(w)) continue;
      const std::int64_t diff = level[u] + 1 - level[w];
      gcd = std::gcd(gcd, static_cast<std::uint64_t>(diff < 0 ? -diff : diff));
    }
  }
  return gcd;
}

inline SccDecomposition scc_decompose(const Digraph& g) {
  const std::uint32_t n = g.n();
  std::uint32_t count = 0;
  const auto label = detail::tarjan_labels(g, count);

  // Renumber so component ids increase with their smallest member.
  constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
  std::vector<std::uint32_t> renumber(count, kUnset);
  std::uint32_t next = 0;
  SccDecomposition dec;
  dec.comp_id.resize(n);
  for (Vertex v = 0; v < n; ++v) {
    std::uint32_t& id = renumber[label[v]];
    if (id == kUnset) {
      id = next++;
      dec.comp_sizes.push_back(0);
    }
    dec.comp_id[v] = id;
    ++dec.comp_sizes[id];
  }
  // Largest; ties go to the smallest id, i.e. the smallest labelled vertex.
  dec.d0 = static_cast<std::uint32_t>(std::max_element(dec.comp_sizes.begin(), dec.comp_sizes.end()) -
                                      dec.comp_sizes.begin());
  for (Vertex v = 0; v < n; ++v) {
    if (dec.comp_id[v] == dec.d0) dec.d0_vertices.push_back(v);
  }
  dec.attractive = is_attractive(g, dec);
  dec.period = period(g, dec);
  return dec;
}

inline nlohmann::json to_json(const SccDecomposition& dec) {
  return {{"sizes", dec.comp_sizes},
          {"d0_size", dec.d0_size()},
          {"attractive", dec.attractive},
          {"period", dec.period}};
}

}  // namespace rout
