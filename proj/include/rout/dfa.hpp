#pragma once

// Random DFA over D(n, r): edge (i, j) is the transition of state i on symbol j.
// Symbols are 0-based here and 1-based in the text formats.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rout/branching.hpp"
#include "rout/digraph.hpp"
#include "rout/error.hpp"
#include "rout/rng.hpp"

namespace rout {

struct Dfa {
  Digraph graph;
  Vertex start = 0;
  std::vector<std::uint8_t> accepting;

  std::uint32_t states() const { return graph.n(); }
  std::uint32_t alphabet() const { return graph.r(); }
  bool operator==(const Dfa&) const = default;
};

/// Transitions from generate(n, r, seed); start and accepting bits from
/// Rng(derive_seed(seed, {1})): start first, then one fair coin per state.
inline Dfa random_dfa(std::uint32_t n, std::uint32_t r, Seed seed) {
  Dfa d{generate(n, r, seed), 0, {}};
  Rng aux(derive_seed(seed, {1}));
  d.start = static_cast<Vertex>(aux.below(n));
  d.accepting.resize(n);
  for (auto& b : d.accepting) b = aux.coin() ? 1 : 0;
  return d;
}

struct WordResult {
  Vertex final_state = 0;
  bool accept = false;
};

inline WordResult run_word(const Dfa& d, std::span<const std::uint32_t> word) {
  Vertex x = d.start;
  const std::uint32_t r = d.alphabet();
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i] >= r) {
      throw ParameterError("symbol " + std::to_string(word[i] + 1) + " at position " + std::to_string(i + 1) +
                           " is outside the alphabet 1.." + std::to_string(r));
    }
    x = d.graph.head(x, word[i]);
  }
  return {x, d.accepting[x] != 0};
}

/// States x_0 = start, x_1, ..., x_m visited while reading the word.
inline std::vector<Vertex> word_trajectory(const Dfa& d, std::span<const std::uint32_t> word) {
  std::vector<Vertex> path{d.start};
  for (std::uint32_t s : word) {
    if (s >= d.alphabet()) throw ParameterError("symbol outside the alphabet");
    path.push_back(d.graph.head(path.back(), s));
  }
  return path;
}

/// m uniform symbols drawn from rng.
inline std::vector<std::uint32_t> sample_word(std::uint32_t r, std::uint64_t m, Rng& rng) {
  std::vector<std::uint32_t> w(m);
  for (auto& s : w) s = static_cast<std::uint32_t>(rng.below(r));
  return w;
}

/// Simple random walk of m steps from the start state: each step follows an
/// out-edge chosen uniformly with rng. Consumes rng exactly as sample_word.
inline std::vector<Vertex> random_walk(const Dfa& d, std::uint64_t m, Rng& rng) {
  std::vector<Vertex> path{d.start};
  path.reserve(m + 1);
  const auto heads = d.graph.heads();
  const std::uint32_t r = d.alphabet();
  for (std::uint64_t i = 0; i < m; ++i) {
    const std::uint64_t edge = static_cast<std::uint64_t>(path.back()) * r + rng.below(r);
    path.push_back(heads[edge]);
  }
  return path;
}

struct VisitLaw {
  std::vector<std::uint64_t> counts;
  std::vector<double> freq;
  std::uint64_t trials = 0;
};

/// Frequencies of the final state over `trials` uniform words of length m.
/// Trials are split over min(trials, 64) sub-streams derive_seed(seed, {c}).
inline VisitLaw uniform_word_visit_law(const Dfa& d, std::uint64_t m, std::uint64_t trials, Seed seed,
                                       unsigned workers = 1) {
  if (trials == 0) throw ParameterError("uniform_word_visit_law: trials must be >= 1");
  const std::uint32_t n = d.states(), r = d.alphabet();
  const std::uint64_t chunks = std::min<std::uint64_t>(trials, 64);
  std::vector<std::vector<std::uint64_t>> part(chunks, std::vector<std::uint64_t>(n, 0));
  const auto heads = d.graph.heads();
  detail::run_chunks(chunks, workers, [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, {c}));
    const std::uint64_t lo = c * trials / chunks, hi = (c + 1) * trials / chunks;
    for (std::uint64_t t = lo; t < hi; ++t) {
      Vertex x = d.start;
      for (std::uint64_t i = 0; i < m; ++i) x = heads[static_cast<std::uint64_t>(x) * r + rng.below(r)];
      ++part[c][x];
    }
  });
  VisitLaw law;
  law.trials = trials;
  law.counts.assign(n, 0);
  for (const auto& p : part) {
    for (std::uint32_t v = 0; v < n; ++v) law.counts[v] += p[v];
  }
  law.freq.resize(n);
  for (std::uint32_t v = 0; v < n; ++v) law.freq[v] = static_cast<double>(law.counts[v]) / static_cast<double>(trials);
  return law;
}

/// Exact law of the walk after m steps from the start state, by m
/// applications of the transition operator.
inline std::vector<double> walk_law(const Dfa& d, std::uint64_t m) {
  const std::uint32_t n = d.states(), r = d.alphabet();
  std::vector<double> x(n, 0.0), y(n);
  x[d.start] = 1.0;
  const auto heads = d.graph.heads();
  const double w = 1.0 / r;
  for (std::uint64_t step = 0; step < m; ++step) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::uint32_t u = 0; u < n; ++u) {
      if (x[u] == 0.0) continue;
      const double mass = x[u] * w;
      for (std::uint32_t j = 0; j < r; ++j) y[heads[static_cast<std::size_t>(u) * r + j]] += mass;
    }
    std::swap(x, y);
  }
  return x;
}

/// Header `n r start`, then `i: h1 ... hr accept_bit`; all indices 1-based.
inline void write_dfa_text(std::ostream& os, const Dfa& d) {
  os << d.states() << ' ' << d.alphabet() << ' ' << d.start + 1 << '\n';
  for (Vertex u = 0; u < d.states(); ++u) {
    os << u + 1 << ':';
    for (Vertex h : d.graph.out(u)) os << ' ' << h + 1;
    os << ' ' << int(d.accepting[u]) << '\n';
  }
}

inline Dfa read_dfa_text(std::istream& is) {
  std::uint64_t n = 0, r = 0, start = 0;
  if (!(is >> n >> r >> start)) throw ConfigError("dfa text: expected header 'n r start'");
  if (n == 0 || r == 0 || n > UINT32_MAX || r > UINT32_MAX) throw ConfigError("dfa text: bad n or r in header");
  if (start < 1 || start > n) throw ConfigError("dfa text: start state out of range");
  std::vector<Vertex> heads(n * r);
  std::vector<std::uint8_t> acc(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string label;
    if (!(is >> label) || label != std::to_string(i + 1) + ":") {
      throw ConfigError("dfa text: expected '" + std::to_string(i + 1) + ":' on state line " + std::to_string(i + 1));
    }
    for (std::uint64_t j = 0; j < r; ++j) {
      std::uint64_t h = 0;
      if (!(is >> h) || h < 1 || h > n) throw ConfigError("dfa text: bad head on state line " + std::to_string(i + 1));
      heads[i * r + j] = static_cast<Vertex>(h - 1);
    }
    int b = -1;
    if (!(is >> b) || (b != 0 && b != 1)) {
      throw ConfigError("dfa text: accept bit must be 0 or 1 on state line " + std::to_string(i + 1));
    }
    acc[i] = static_cast<std::uint8_t>(b);
  }
  return Dfa{Digraph(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r), std::move(heads)),
             static_cast<Vertex>(start - 1), std::move(acc)};
}

/// Whitespace-separated 1-based symbols.
inline std::vector<std::uint32_t> read_word(std::istream& is, std::uint32_t r) {
  std::vector<std::uint32_t> w;
  std::string tok;
  while (is >> tok) {
    std::uint64_t s = 0;
    try {
      std::size_t used = 0;
      s = std::stoull(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("word: '" + tok + "' is not a symbol index");
    }
    if (s < 1 || s > r) throw ConfigError("word: symbol " + tok + " outside 1.." + std::to_string(r));
    w.push_back(static_cast<std::uint32_t>(s - 1));
  }
  return w;
}

}  // namespace rout
