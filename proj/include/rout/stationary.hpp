#pragma once

// Simple random walk on the largest strongly connected component D0.
//
// The walk leaves u along a uniformly chosen out-edge, so P(u -> w) equals
// multiplicity(u, w) / r. Besides the stationary vector this header holds
// the maze quantities used to bound pi(v): single-exit hardness of the
// in-ball N_{<=k}^-(v) and the exact probability of leaving that ball
// before returning to v.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rout/bfs.hpp"
#include "rout/digraph.hpp"
#include "rout/error.hpp"
#include "rout/linalg.hpp"
#include "rout/rng.hpp"
#include "rout/scc.hpp"

namespace rout {

struct TransitionEntry {
  Vertex to;
  std::uint32_t multiplicity;  // probability is multiplicity / r
  double probability;
};

namespace detail {

inline void require_closed_d0(const Digraph& g, const SccDecomposition& dec) {
  if (!is_closed(g, dec)) {
    throw StructureError("D0 is not closed under out-edges (attractivity violated); the walk would leave it");
  }
}

}  // namespace detail

/// Row of the transition matrix at v, ascending by target.
inline std::vector<TransitionEntry> transition_row(const Digraph& g, const SccDecomposition& dec, Vertex v) {
  if (v >= g.n() || !dec.in_d0(v)) throw ParameterError("transition_row: vertex is not in D0");
  detail::require_closed_d0(g, dec);
  std::vector<Vertex> heads(g.out(v).begin(), g.out(v).end());
  std::sort(heads.begin(), heads.end());
  std::vector<TransitionEntry> row;
  for (std::size_t i = 0; i < heads.size();) {
    std::size_t j = i;
    while (j < heads.size() && heads[j] == heads[i]) ++j;
    const auto mult = static_cast<std::uint32_t>(j - i);
    row.push_back({heads[i], mult, static_cast<double>(mult) / g.r()});
    i = j;
  }
  return row;
}

struct StationaryProfile {
  std::uint32_t n = 0;            // vertex count of the whole graph (base of the exponents)
  std::vector<Vertex> support;    // D0, ascending
  std::vector<double> pi;         // pi[i] is the mass of support[i]
  std::vector<std::uint32_t> position;  // vertex -> index into support, kNoVertex outside
  double residual = 0.0;          // ||pi P - pi||_1 for the non-lazy P
  double pi_max = 0.0, pi_min = 0.0;
  Vertex argmax = 0, argmin = 0;  // smallest vertex attaining the extreme
  double exp_max = 0.0, exp_min = 0.0;  // -log_n pi_max, -log_n pi_min
  std::uint64_t iterations = 0;
  bool converged = true;

  double at(Vertex v) const {
    const auto p = position.at(v);
    return p == kNoVertex ? 0.0 : pi[p];
  }
};

constexpr double kDefaultPowerTol = 1e-12;
constexpr std::uint64_t kDefaultPowerMaxIter = 1'000'000;
constexpr std::size_t kDefaultDirectCap = 2000;

namespace detail {

// D0 restricted to local indices: local_heads[i * r + j] is the local index
// of the j-th head of support[i].
struct LocalChain {
  std::vector<Vertex> support;
  std::vector<std::uint32_t> position;
  std::vector<std::uint32_t> local_heads;
  std::uint32_t r = 0;
};

inline LocalChain local_chain(const Digraph& g, const SccDecomposition& dec) {
  require_closed_d0(g, dec);
  LocalChain c;
  c.r = g.r();
  c.support = dec.d0_vertices;
  c.position.assign(g.n(), kNoVertex);
  for (std::size_t i = 0; i < c.support.size(); ++i) c.position[c.support[i]] = static_cast<std::uint32_t>(i);
  c.local_heads.reserve(c.support.size() * c.r);
  for (Vertex u : c.support) {
    for (Vertex h : g.out(u)) c.local_heads.push_back(c.position[h]);
  }
  return c;
}

// y = x P
inline void apply_transition(const LocalChain& c, const std::vector<double>& x, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  const double inv_r = 1.0 / c.r;
  const std::size_t m = c.support.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double share = x[i] * inv_r;
    const std::uint32_t* hs = &c.local_heads[i * c.r];
    for (std::uint32_t j = 0; j < c.r; ++j) y[hs[j]] += share;
  }
}

inline double l1_residual(const LocalChain& c, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  apply_transition(c, x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(y[i] - x[i]);
  return s;
}

inline StationaryProfile finish_profile(const Digraph& g, LocalChain&& c, std::vector<double>&& x) {
  double sum = 0.0;
  for (double& v : x) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  for (double& v : x) v /= sum;
  StationaryProfile p;
  p.n = g.n();
  p.residual = l1_residual(c, x);
  p.pi_max = -1.0;
  p.pi_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > p.pi_max) {
      p.pi_max = x[i];
      p.argmax = c.support[i];
    }
    if (x[i] < p.pi_min) {
      p.pi_min = x[i];
      p.argmin = c.support[i];
    }
  }
  const double ln_n = std::log(static_cast<double>(g.n()));
  p.exp_max = g.n() > 1 ? -std::log(p.pi_max) / ln_n : 0.0;
  p.exp_min = g.n() > 1 ? -std::log(p.pi_min) / ln_n : 0.0;
  p.support = std::move(c.support);
  p.position = std::move(c.position);
  p.pi = std::move(x);
  return p;
}

}  // namespace detail

/// Power iteration with the lazy operator (I + P) / 2 started from the
/// uniform vector on D0. Stops once the l1 change of one step is <= tol;
/// the reported residual is measured against P itself.
inline StationaryProfile stationary_power(const Digraph& g, const SccDecomposition& dec, double tol = kDefaultPowerTol,
                                          std::uint64_t max_iter = kDefaultPowerMaxIter) {
  auto c = detail::local_chain(g, dec);
  const std::size_t m = c.support.size();
  std::vector<double> x(m, 1.0 / static_cast<double>(m)), y(m);
  bool converged = false;
  std::uint64_t it = 0;
  while (it < max_iter) {
    ++it;
    detail::apply_transition(c, x, y);
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double z = 0.5 * (x[i] + y[i]);
      change += std::fabs(z - x[i]);
      x[i] = z;
    }
    if (change <= tol) {
      converged = true;
      break;
    }
  }
  auto p = detail::finish_profile(g, std::move(c), std::move(x));
  p.iterations = it;
  p.converged = converged;
  return p;
}

/// Dense solve of pi (P - I) = 0 with sum(pi) = 1. Oracle for stationary_power.
inline StationaryProfile stationary_direct(const Digraph& g, const SccDecomposition& dec,
                                           std::size_t cap = kDefaultDirectCap) {
  if (dec.d0_size() > cap) {
    throw LimitError("stationary_direct: |D0| = " + std::to_string(dec.d0_size()) + " exceeds cap " +
                     std::to_string(cap));
  }
  auto c = detail::local_chain(g, dec);
  const std::size_t m = c.support.size();
  // Row i of A is the balance equation for state i: sum_u pi_u P(u, i) - pi_i = 0.
  std::vector<double> a(m * m, 0.0), b(m, 0.0);
  const double inv_r = 1.0 / c.r;
  for (std::size_t u = 0; u < m; ++u) {
    for (std::uint32_t j = 0; j < c.r; ++j) a[c.local_heads[u * c.r + j] * m + u] += inv_r;
    a[u * m + u] -= 1.0;
  }
  // The balance equations have rank m - 1; replace the last by normalization.
  for (std::size_t u = 0; u < m; ++u) a[(m - 1) * m + u] = 1.0;
  b[m - 1] = 1.0;
  detail::solve_dense(a, b, m);
  return detail::finish_profile(g, std::move(c), std::move(b));
}

struct ReturnTimeEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
};

/// Monte Carlo estimate of E_v[tau_v^+] = 1 / pi(v) for the non-lazy walk.
/// Trials are split over min(trials, 64) sub-streams derive_seed(seed, {c}),
/// so the result does not depend on the worker count.
inline ReturnTimeEstimate mean_return_time(const Digraph& g, const SccDecomposition& dec, Vertex v,
                                           std::uint64_t trials, Seed seed,
                                           std::optional<std::uint64_t> step_cap = std::nullopt,
                                           unsigned workers = 1) {
  if (v >= g.n() || !dec.in_d0(v)) throw ParameterError("mean_return_time: vertex is not in D0");
  if (trials == 0) throw ParameterError("mean_return_time: trials must be >= 1");
  detail::require_closed_d0(g, dec);
  const std::uint64_t cap = step_cap.value_or(std::max<std::uint64_t>(1, 1'000'000'000ULL / trials));
  const std::uint64_t chunks = std::min<std::uint64_t>(trials, 64);
  std::vector<double> sums(chunks, 0.0), sq(chunks, 0.0);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> aborted{false};
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks || aborted) return;
      Rng rng(derive_seed(seed, {c}));
      const std::uint64_t lo = c * trials / chunks, hi = (c + 1) * trials / chunks;
      for (std::uint64_t t = lo; t < hi; ++t) {
        Vertex x = v;
        std::uint64_t steps = 0;
        do {
          x = g.head(x, static_cast<std::uint32_t>(rng.below(g.r())));
          ++steps;
          if (steps > cap) {
            aborted = true;
            return;
          }
        } while (x != v);
        sums[c] += static_cast<double>(steps);
        sq[c] += static_cast<double>(steps) * static_cast<double>(steps);
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (aborted) {
    throw LimitError("mean_return_time: a trial from vertex " + std::to_string(v + 1) + " exceeded " +
                     std::to_string(cap) + " steps");
  }
  double s = 0.0, s2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s += sums[c];
    s2 += sq[c];
  }
  const double t = static_cast<double>(trials);
  ReturnTimeEstimate est;
  est.trials = trials;
  est.mean = s / t;
  const double var = trials > 1 ? std::max(0.0, (s2 - t * est.mean * est.mean) / (t - 1.0)) : 0.0;
  est.stderr_ = std::sqrt(var / t);
  return est;
}

// ---------------------------------------------------------------------------
// Mazes

/// The in-ball N_{<=k}^-(v) viewed as a maze with entrances N_k^-(v).
struct Maze {
  Vertex center = 0;
  std::uint32_t depth = 0;
  std::vector<Vertex> vertices;   // iBFS discovery order
  std::vector<Vertex> entrance;   // N_k^-(v)
  std::vector<std::uint8_t> member;  // per graph vertex
  std::vector<std::uint32_t> inside_edges;  // per graph vertex: |E(u, maze)|, multiplicity counted
};

inline Maze build_maze(const Digraph& g, Vertex v, std::uint32_t k) {
  if (v >= g.n()) throw ParameterError("maze center is not a vertex");
  const auto b = ibfs(g, v, k);
  Maze m;
  m.center = v;
  m.depth = k;
  m.vertices = b.order;
  if (b.layers.size() > k) m.entrance = b.layers[k];
  m.member.assign(g.n(), 0);
  for (Vertex u : m.vertices) m.member[u] = 1;
  m.inside_edges.assign(g.n(), 0);
  for (Vertex u : m.vertices) {
    for (Vertex h : g.out(u)) m.inside_edges[u] += m.member[h];
  }
  return m;
}

struct MazeHardness {
  Vertex center = 0;
  std::uint32_t depth = 0;
  std::vector<Vertex> maze;         // ascending
  std::vector<Vertex> single_exit;  // maze vertices with exactly one edge into the maze, ascending
  std::uint32_t h = 0;              // the largest h for which the maze is h-hard
  std::vector<Vertex> witness;      // entrance -> ... -> center attaining h
};

/// Exact hardness: the minimum, over directed paths inside the maze from an
/// entrance to the center, of the number of single-exit vertices on the
/// path. Computed by a 0/1-weighted search backwards from the center.
inline MazeHardness maze_hardness(const Digraph& g, Vertex v, std::uint32_t k) {
  Maze mz = build_maze(g, v, k);
  if (mz.entrance.empty()) {
    throw StructureError("maze_hardness: entrance layer N_" + std::to_string(k) + "^-(" + std::to_string(v + 1) +
                         ") is empty");
  }
  auto weight = [&](Vertex u) -> std::uint32_t { return mz.inside_edges[u] == 1 ? 1 : 0; };
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> cost(g.n(), kInf);
  std::vector<Vertex> succ(g.n(), kNoVertex);
  std::deque<Vertex> dq{v};
  cost[v] = weight(v);
  while (!dq.empty()) {
    const Vertex u = dq.front();
    dq.pop_front();
    for (Vertex t : g.in(u)) {
      if (!mz.member[t]) continue;
      const std::uint32_t w = weight(t);
      const std::uint32_t c = cost[u] + w;
      if (c < cost[t]) {
        cost[t] = c;
        succ[t] = u;
        if (w == 0) dq.push_front(t);
        else dq.push_back(t);
      }
    }
  }
  MazeHardness res;
  res.center = v;
  res.depth = k;
  res.maze = mz.vertices;
  std::sort(res.maze.begin(), res.maze.end());
  for (Vertex u : res.maze) {
    if (weight(u)) res.single_exit.push_back(u);
  }
  Vertex start = kNoVertex;
  for (Vertex e : mz.entrance) {
    if (start == kNoVertex || cost[e] < cost[start] || (cost[e] == cost[start] && e < start)) start = e;
  }
  res.h = cost[start];
  for (Vertex x = start; x != kNoVertex; x = (x == v ? kNoVertex : succ[x])) res.witness.push_back(x);
  return res;
}

struct EscapeProbability {
  Vertex center = 0;
  std::uint32_t depth = 0;
  double value = 0.0;  // P_v(walk leaves N_{<=k}^-(v) no later than it returns to v)
};

constexpr std::size_t kDefaultEscapeCap = 10'000;

/// Exact absorbing-chain computation. For maze states w != v,
/// q(w) = P_w(exit before v) solves q = Q q + b; the answer is the average of
/// q over the r first steps from v (exit counts 1, v counts 0).
inline EscapeProbability escape_probability(const Digraph& g, Vertex v, std::uint32_t k,
                                            std::size_t state_cap = kDefaultEscapeCap) {
  Maze mz = build_maze(g, v, k);
  if (mz.vertices.size() > state_cap) {
    throw LimitError("escape_probability: maze has " + std::to_string(mz.vertices.size()) + " states, cap is " +
                     std::to_string(state_cap));
  }
  std::vector<Vertex> states;
  std::vector<std::uint32_t> idx(g.n(), kNoVertex);
  for (Vertex u : mz.vertices) {
    if (u == v) continue;
    idx[u] = static_cast<std::uint32_t>(states.size());
    states.push_back(u);
  }
  const std::size_t m = states.size();
  const double inv_r = 1.0 / g.r();
  std::vector<double> q(m, 0.0);
  if (m > 0 && m <= 2048) {
    std::vector<double> a(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      a[i * m + i] = 1.0;
      for (Vertex h : g.out(states[i])) {
        if (!mz.member[h]) q[i] += inv_r;
        else if (h != v) a[i * m + idx[h]] -= inv_r;
      }
    }
    detail::solve_dense(a, q, m);
  } else if (m > 0) {
    // Gauss-Seidel; converges because v is reachable from every state.
    for (int sweep = 0; sweep < 1'000'000; ++sweep) {
      double delta = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (Vertex h : g.out(states[i])) {
          if (!mz.member[h]) s += inv_r;
          else if (h != v) s += inv_r * q[idx[h]];
        }
        delta = std::max(delta, std::fabs(s - q[i]));
        q[i] = s;
      }
      if (delta < 1e-15) break;
    }
  }
  EscapeProbability e;
  e.center = v;
  e.depth = k;
  for (Vertex h : g.out(v)) {
    if (!mz.member[h]) e.value += inv_r;
    else if (h != v) e.value += inv_r * q[idx[h]];
  }
  e.value = std::clamp(e.value, 0.0, 1.0);
  return e;
}

// ---------------------------------------------------------------------------
// Bound validators

struct PimaxCheck {
  Vertex vertex = 0;
  std::uint32_t k = 0;
  std::uint32_t h = 0;
  double pi_v = 0.0;
  double escape = 0.0;
  double lhs = 0.0;     // pi(v) * r^h * escape, must be <= 1
  double margin = 0.0;  // 1 - lhs
  bool ok = false;
};

/// pi(v) <= 1 / (r^h * P_v(escape)) for an h-hard maze.
inline PimaxCheck validate_pimax_bound(const StationaryProfile& profile, const MazeHardness& hardness,
                                       const EscapeProbability& escape, std::uint32_t r) {
  if (hardness.center != escape.center || hardness.depth != escape.depth) {
    throw ParameterError("validate_pimax_bound: hardness and escape computed for different (v, k)");
  }
  PimaxCheck c;
  c.vertex = hardness.center;
  c.k = hardness.depth;
  c.h = hardness.h;
  c.pi_v = profile.at(c.vertex);
  c.escape = escape.value;
  c.lhs = c.pi_v * std::pow(static_cast<double>(r), c.h) * c.escape;
  c.margin = 1.0 - c.lhs;
  c.ok = c.lhs <= 1.0 + 1e-9;
  return c;
}

struct PiminCheck {
  double pi_min = 0.0;
  std::uint32_t d = 0;
  double bound = 0.0;  // 1 / (1 + d r^d)
  double slack = 0.0;  // pi_min - bound
  bool ok = false;
};

/// pi_min >= 1 / (1 + d r^d) when diam(D0) <= d; slack is allowed only up
/// to the solver residual.
inline PiminCheck validate_pimin_bound(const StationaryProfile& profile, std::uint32_t d, std::uint32_t r) {
  PiminCheck c;
  c.pi_min = profile.pi_min;
  c.d = d;
  c.bound = 1.0 / (1.0 + static_cast<double>(d) * std::pow(static_cast<double>(r), d));
  c.slack = c.pi_min - c.bound;
  c.ok = c.slack >= -(profile.residual + 1e-15);
  return c;
}

struct FlagLinkCheck {
  Vertex vertex = 0;
  std::uint32_t k = 0;
  std::uint64_t entrance = 0;  // |N_k^-(v)|
  double pi_v = 0.0;
  double bound = 0.0;          // entrance * r^-k * pi_max
  bool ok = false;
};

/// pi(v) <= |N_k^-(v)| r^-k pi_max, which holds when D[N_{<=k}^-(v)] is a tree
/// (every length-k path into v then starts in N_k^-(v) and is unique).
inline FlagLinkCheck validate_flag_linkage(const Digraph& g, const StationaryProfile& profile, Vertex v,
                                           std::uint32_t k) {
  FlagLinkCheck c;
  c.vertex = v;
  c.k = k;
  const auto b = ibfs(g, v, k);
  c.entrance = b.layers.size() > k ? b.layers[k].size() : 0;
  c.pi_v = profile.at(v);
  c.bound = static_cast<double>(c.entrance) * std::pow(static_cast<double>(g.r()), -static_cast<double>(k)) *
            profile.pi_max;
  c.ok = c.pi_v <= c.bound * (1.0 + 1e-9) + profile.residual;
  return c;
}

}  // namespace rout
