#pragma once

// r-out regular directed multigraphs.
//
// Vertices are 0-based (0 .. n-1) everywhere inside the library. Every
// human-facing serializer (text, JSON, CSV, CLI) writes and reads them
// 1-based, matching the usual [n] = {1, ..., n} labelling.

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rout/error.hpp"
#include "rout/rng.hpp"

namespace rout {

using Vertex = std::uint32_t;

/// Immutable r-out multigraph. heads()[u * r + j] is the head of the j-th
/// edge out of u. Loops and parallel edges are allowed.
class Digraph {
 public:
  Digraph(std::uint32_t n, std::uint32_t r, std::vector<Vertex> heads)
      : n_(n), r_(r), heads_(std::move(heads)), reverse_(std::make_shared<ReverseIndex>()) {
    if (n_ == 0 || r_ == 0) throw ParameterError("digraph needs n >= 1 and r >= 1");
    if (heads_.size() != static_cast<std::size_t>(n_) * r_) {
      throw ParameterError("digraph heads length " + std::to_string(heads_.size()) + " != n*r = " +
                           std::to_string(static_cast<std::size_t>(n_) * r_));
    }
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      if (heads_[i] >= n_) {
        throw ParameterError("head " + std::to_string(heads_[i]) + " of edge " + std::to_string(i) +
                             " is not a vertex");
      }
    }
  }

  std::uint32_t n() const { return n_; }
  std::uint32_t r() const { return r_; }
  std::size_t edge_count() const { return heads_.size(); }

  std::span<const Vertex> heads() const { return heads_; }
  std::span<const Vertex> out(Vertex u) const {
    return {heads_.data() + static_cast<std::size_t>(u) * r_, r_};
  }
  Vertex head(Vertex u, std::uint32_t j) const { return heads_[static_cast<std::size_t>(u) * r_ + j]; }

  /// Tails of the edges into v, ascending, one entry per edge (so a vertex
  /// with two parallel edges into v appears twice). The reverse index is
  /// built once on first use; concurrent first calls are safe.
  std::span<const Vertex> in(Vertex v) const {
    const ReverseIndex& rev = reverse();
    return {rev.tails.data() + rev.offsets[v], rev.offsets[v + 1] - rev.offsets[v]};
  }

  std::size_t in_degree(Vertex v) const {
    const ReverseIndex& rev = reverse();
    return rev.offsets[v + 1] - rev.offsets[v];
  }

  /// Number of parallel edges u -> w.
  std::uint32_t multiplicity(Vertex u, Vertex w) const {
    std::uint32_t m = 0;
    for (Vertex h : out(u)) m += (h == w);
    return m;
  }

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.n_ == b.n_ && a.r_ == b.r_ && a.heads_ == b.heads_;
  }

 private:
  struct ReverseIndex {
    std::once_flag once;
    std::vector<std::size_t> offsets;
    std::vector<Vertex> tails;
  };

  const ReverseIndex& reverse() const {
    ReverseIndex& rev = *reverse_;
    std::call_once(rev.once, [&] {
      rev.offsets.assign(static_cast<std::size_t>(n_) + 1, 0);
      for (Vertex h : heads_) ++rev.offsets[h + 1];
      for (std::size_t v = 0; v < n_; ++v) rev.offsets[v + 1] += rev.offsets[v];
      rev.tails.resize(heads_.size());
      std::vector<std::size_t> cursor(rev.offsets.begin(), rev.offsets.end() - 1);
      for (Vertex u = 0; u < n_; ++u) {
        for (Vertex h : out(u)) rev.tails[cursor[h]++] = u;
      }
    });
    return rev;
  }

  std::uint32_t n_;
  std::uint32_t r_;
  std::vector<Vertex> heads_;
  std::shared_ptr<ReverseIndex> reverse_;
};

/// Fills heads with n*r independent uniform vertices, drawn in (i, j)
/// lexicographic order from Rng(seed).
inline void fill_uniform_heads(std::uint32_t n, std::uint32_t r, Seed seed, std::span<Vertex> heads) {
  Rng rng(seed);
  const std::size_t total = static_cast<std::size_t>(n) * r;
  for (std::size_t i = 0; i < total; ++i) heads[i] = static_cast<Vertex>(rng.below(n));
}

/// D(n, r): every head is an independent uniform draw over the n vertices.
inline Digraph generate(std::uint32_t n, std::uint32_t r, Seed seed) {
  if (n == 0 || r == 0) throw ParameterError("generate requires n >= 1 and r >= 1");
  std::vector<Vertex> heads(static_cast<std::size_t>(n) * r);
  fill_uniform_heads(n, r, seed, heads);
  return Digraph(n, r, std::move(heads));
}

/// True when no vertex has a self-loop or two edges to the same head.
inline bool is_simple(const Digraph& g) {
  const std::uint32_t r = g.r();
  for (Vertex u = 0; u < g.n(); ++u) {
    auto out = g.out(u);
    for (std::uint32_t j = 0; j < r; ++j) {
      if (out[j] == u) return false;
      for (std::uint32_t k = 0; k < j; ++k) {
        if (out[k] == out[j]) return false;
      }
    }
  }
  return true;
}

constexpr std::uint64_t kDefaultSimpleRetries = 1'000'000;

struct SimpleSample {
  Digraph graph;
  std::uint64_t attempts;  // candidates drawn, including the accepted one
};

/// Uniform simple r-out digraph by rejection: candidate t (0-based) is
/// generate(n, r, derive_seed(seed, {t})).
inline SimpleSample generate_simple_counted(std::uint32_t n, std::uint32_t r, Seed seed,
                                            std::uint64_t max_attempts = kDefaultSimpleRetries) {
  if (r == 0 || n <= r) {
    throw ParameterError("generate_simple requires n > r >= 1 (got n=" + std::to_string(n) +
                         ", r=" + std::to_string(r) + ")");
  }
  std::vector<Vertex> heads(static_cast<std::size_t>(n) * r);
  for (std::uint64_t t = 0; t < max_attempts; ++t) {
    fill_uniform_heads(n, r, derive_seed(seed, {t}), heads);
    bool simple = true;
    for (Vertex u = 0; u < n && simple; ++u) {
      const Vertex* row = heads.data() + static_cast<std::size_t>(u) * r;
      for (std::uint32_t j = 0; j < r && simple; ++j) {
        if (row[j] == u) simple = false;
        for (std::uint32_t k = 0; k < j && simple; ++k) simple = row[k] != row[j];
      }
    }
    if (simple) return {Digraph(n, r, std::move(heads)), t + 1};
  }
  throw LimitError("generate_simple: no simple digraph after " + std::to_string(max_attempts) +
                   " attempts (n=" + std::to_string(n) + ", r=" + std::to_string(r) + ")");
}

inline Digraph generate_simple(std::uint32_t n, std::uint32_t r, Seed seed,
                               std::uint64_t max_attempts = kDefaultSimpleRetries) {
  return generate_simple_counted(n, r, seed, max_attempts).graph;
}

/// Vertices all of whose r out-edges are self-loops.
inline std::vector<Vertex> loop_vertices(const Digraph& g) {
  std::vector<Vertex> result;
  for (Vertex u = 0; u < g.n(); ++u) {
    bool all = true;
    for (Vertex h : g.out(u)) all = all && (h == u);
    if (all) result.push_back(u);
  }
  return result;
}

// Deterministic fixtures.

/// heads(i, j) = i + 1 mod n: a directed n-cycle with r parallel copies.
inline Digraph cycle_graph(std::uint32_t n, std::uint32_t r) {
  std::vector<Vertex> heads(static_cast<std::size_t>(n) * r);
  for (Vertex u = 0; u < n; ++u) {
    for (std::uint32_t j = 0; j < r; ++j) heads[static_cast<std::size_t>(u) * r + j] = (u + 1) % n;
  }
  return Digraph(n, r, std::move(heads));
}

/// heads(i, j) = i: every edge is a self-loop.
inline Digraph all_loops_graph(std::uint32_t n, std::uint32_t r) {
  std::vector<Vertex> heads(static_cast<std::size_t>(n) * r);
  for (Vertex u = 0; u < n; ++u) {
    for (std::uint32_t j = 0; j < r; ++j) heads[static_cast<std::size_t>(u) * r + j] = u;
  }
  return Digraph(n, r, std::move(heads));
}

}  // namespace rout
