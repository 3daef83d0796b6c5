#pragma once

// Model constants and Poisson(r) Galton-Watson trees.
//
// lambda_r is the positive root of 1 - lambda = exp(-r lambda): the survival
// probability of a Poisson(r) Galton-Watson tree and the limiting fraction of
// vertices in the giant strongly connected component. eta_r is the excess
// diameter constant, diam ~ (1 + eta_r) log_r n.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "rout/digraph.hpp"
#include "rout/error.hpp"
#include "rout/rng.hpp"
#include "rout/stats.hpp"

namespace rout {

struct ModelConstants {
  std::uint32_t r = 0;
  double lambda = 0.0;      // survival probability / giant fraction
  double extinction = 0.0;  // 1 - lambda, kept separately so it stays accurate when lambda rounds to 1
  double eta = 0.0;         // 1 / (log_r(1 / (1 - lambda)) - 1)
  double eta_alt = 0.0;     // log r / (lambda r - log r)
  double residual = 0.0;    // |1 - lambda - exp(-r lambda)|
};

/// Bisection on the extinction probability q = 1 - lambda in [0, 1/2],
/// f(q) = q - exp(-r (1 - q)); runs until the bracket cannot shrink.
inline ModelConstants solve_constants(std::uint32_t r) {
  if (r < 2) throw ParameterError("solve_constants requires r >= 2 (got r=" + std::to_string(r) + ")");
  const double rr = r;
  auto f = [&](double q) { return q - std::exp(-rr * (1.0 - q)); };
  double lo = 0.0, hi = 0.5;  // f(lo) < 0 < f(hi) for r >= 2
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  const double q = std::fabs(f(lo)) <= std::fabs(f(hi)) ? lo : hi;
  ModelConstants c;
  c.r = r;
  c.extinction = q;
  c.lambda = 1.0 - q;
  const double ln_r = std::log(rr);
  c.eta = 1.0 / (-std::log(q) / ln_r - 1.0);
  c.eta_alt = ln_r / (c.lambda * rr - ln_r);
  c.residual = std::fabs(f(q));
  return c;
}

struct GwSample {
  std::vector<std::uint64_t> generation_sizes;  // |T_0| = 1, |T_1|, ...
  bool truncated = false;                       // stopped early at the population cap
};

constexpr std::uint64_t kDefaultPopCap = 10'000'000;

/// Generation sizes of a Poisson(r) Galton-Watson tree up to generation kmax.
/// Generation k+1 is a sum of |T_k| iid Poisson(r) draws, sampled as one
/// Poisson(r |T_k|) variate. Sampling stops (truncated = true) once the total
/// population exceeds pop_cap.
inline GwSample gw_sample(std::uint32_t r, std::uint32_t kmax, std::uint64_t pop_cap, Seed seed) {
  Rng rng(seed);
  GwSample s;
  s.generation_sizes.push_back(1);
  std::uint64_t total = 1;
  for (std::uint32_t k = 1; k <= kmax; ++k) {
    const std::uint64_t m = s.generation_sizes.back();
    const std::uint64_t next = m == 0 ? 0 : sample_poisson(rng, static_cast<double>(r) * static_cast<double>(m));
    s.generation_sizes.push_back(next);
    total += next;
    if (total > pop_cap) {
      s.truncated = true;
      break;
    }
  }
  return s;
}

struct TailEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
};

namespace detail {

template <class Fn>
void run_chunks(std::uint64_t chunks, unsigned workers, Fn&& fn) {
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) fn(c);
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Monte Carlo frequency of {0 < |T_k| < omega}. Trials are split over
/// min(trials, 64) sub-streams derive_seed(seed, {c}).
inline TailEstimate gw_tail_prob(std::uint32_t r, std::uint32_t k, std::uint64_t omega, std::uint64_t trials,
                                 Seed seed, unsigned workers = 1) {
  if (trials == 0) throw ParameterError("gw_tail_prob: trials must be >= 1");
  const std::uint64_t chunks = std::min<std::uint64_t>(trials, 64);
  std::vector<std::uint64_t> hits(chunks, 0);
  detail::run_chunks(chunks, workers, [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, {c}));
    const std::uint64_t lo = c * trials / chunks, hi = (c + 1) * trials / chunks;
    for (std::uint64_t t = lo; t < hi; ++t) {
      std::uint64_t z = 1;
      for (std::uint32_t j = 0; j < k && z > 0; ++j) z = sample_poisson(rng, static_cast<double>(r) * static_cast<double>(z));
      hits[c] += (z > 0 && z < omega);
    }
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  TailEstimate e;
  e.trials = trials;
  e.estimate = static_cast<double>(total) / static_cast<double>(trials);
  e.stderr_ = stats::bernoulli_se(e.estimate, trials);
  return e;
}

/// Pr(0 < |T_k| < omega) by propagating the law of |T_j| over sizes
/// 0..support_cap (given |T_j| = m, |T_{j+1}| ~ Poisson(r m)); mass above
/// support_cap is lumped and treated as never returning below omega.
inline double gw_tail_prob_exact(std::uint32_t r, std::uint32_t k, std::uint64_t omega,
                                 std::uint64_t support_cap = 0) {
  if (omega <= 1) return 0.0;
  if (support_cap == 0) support_cap = std::max<std::uint64_t>(64, 16 * omega);
  if (support_cap < omega) support_cap = omega;
  const std::size_t m_cap = support_cap;
  std::vector<double> p(m_cap + 1, 0.0), np(m_cap + 1);
  p[1] = 1.0;
  for (std::uint32_t gen = 0; gen < k; ++gen) {
    std::fill(np.begin(), np.end(), 0.0);
    np[0] = p[0];
    for (std::size_t m = 1; m <= m_cap; ++m) {
      if (p[m] == 0.0) continue;
      const double mean = static_cast<double>(r) * static_cast<double>(m);
      for (std::size_t j = 0; j <= m_cap; ++j) np[j] += p[m] * stats::poisson_pmf(mean, j);
    }
    std::swap(p, np);
  }
  double s = 0.0;
  for (std::uint64_t j = 1; j < omega && j <= m_cap; ++j) s += p[j];
  return s;
}

// ---------------------------------------------------------------------------
// Plane-tree shapes and the in-neighbourhood / Galton-Watson coupling.

/// A depth-k plane tree encoded as the child counts of its vertices at depth
/// < k in breadth-first order (children ordered left to right). Shapes
/// larger than the size cap collapse to the single lumped key {kLumpedShape}.
using ShapeCode = std::vector<std::uint32_t>;
constexpr std::uint32_t kLumpedShape = 0xFFFFFFFFu;

/// Shape of the inward search tree T^-_{<=k}(D, v). Children of a vertex are
/// its not-yet-discovered in-neighbours in increasing label order.
inline ShapeCode in_tree_shape(const Digraph& g, Vertex v, std::uint32_t k, std::uint64_t size_cap) {
  std::vector<std::uint32_t> pos(g.n(), kLumpedShape);  // position within current layer
  std::vector<std::uint8_t> seen(g.n(), 0);
  std::vector<Vertex> layer{v};
  seen[v] = 1;
  ShapeCode code;
  std::uint64_t size = 1;
  const std::uint32_t r = g.r();
  const auto heads = g.heads();
  for (std::uint32_t depth = 0; depth < k; ++depth) {
    for (std::size_t i = 0; i < layer.size(); ++i) pos[layer[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<Vertex>> buckets(layer.size());
    for (Vertex w = 0; w < g.n(); ++w) {
      if (seen[w]) continue;
      std::uint32_t best = kLumpedShape;
      for (std::uint32_t j = 0; j < r; ++j) best = std::min(best, pos[heads[static_cast<std::size_t>(w) * r + j]]);
      if (best != kLumpedShape) buckets[best].push_back(w);
    }
    for (Vertex u : layer) pos[u] = kLumpedShape;
    std::vector<Vertex> next;
    for (auto& b : buckets) {
      code.push_back(static_cast<std::uint32_t>(b.size()));
      for (Vertex w : b) {
        seen[w] = 1;
        next.push_back(w);
      }
    }
    size += next.size();
    if (size > size_cap) return {kLumpedShape};
    layer = std::move(next);
  }
  return code;
}

/// Shape of a Poisson(r) Galton-Watson tree truncated at depth k.
inline ShapeCode gw_tree_shape(std::uint32_t r, std::uint32_t k, std::uint64_t size_cap, Rng& rng) {
  ShapeCode code;
  std::uint64_t layer = 1, size = 1;
  for (std::uint32_t depth = 0; depth < k; ++depth) {
    std::uint64_t next = 0;
    for (std::uint64_t i = 0; i < layer; ++i) {
      const auto c = static_cast<std::uint32_t>(sample_poisson(rng, r));
      code.push_back(c);
      next += c;
    }
    size += next;
    if (size > size_cap) return {kLumpedShape};
    layer = next;
  }
  return code;
}

struct CouplingReport {
  double tv = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t size_cap = 0;
  std::map<ShapeCode, std::uint64_t> graph_shapes;
  std::map<ShapeCode, std::uint64_t> gw_shapes;
  std::vector<std::uint64_t> graph_d1;  // d_1^-(v) per graph-side trial
};

// Above this the empirical TV of 10^5-sample laws is dominated by its own noise floor.
constexpr std::uint64_t kDefaultShapeCap = 8;

/// Empirical total-variation distance between the shape law of the inward
/// search tree of depth k at vertex 1 of D(n, r) and that of a Poisson(r)
/// Galton-Watson tree, with `trials` independent samples on each side.
/// Graph trial t uses generate(n, r, derive_seed(seed, {0, t})); the tree
/// side uses Rng(derive_seed(seed, {1, c})) per chunk c.
inline CouplingReport coupling_tv(std::uint32_t n, std::uint32_t r, std::uint32_t k, std::uint64_t trials, Seed seed,
                                  std::uint64_t size_cap = kDefaultShapeCap) {
  if (n == 0 || r == 0) throw ParameterError("coupling_tv requires n >= 1 and r >= 1");
  if (trials == 0) throw ParameterError("coupling_tv: trials must be >= 1");
  CouplingReport rep;
  rep.trials = trials;
  rep.size_cap = size_cap;
  rep.graph_d1.reserve(trials);
  std::vector<Vertex> heads(static_cast<std::size_t>(n) * r);
  for (std::uint64_t t = 0; t < trials; ++t) {
    fill_uniform_heads(n, r, derive_seed(seed, {0, t}), heads);
    Digraph g(n, r, heads);
    std::uint64_t d1 = 0;
    for (Vertex w = 1; w < n; ++w) {
      bool hit = false;
      for (std::uint32_t j = 0; j < r; ++j) hit = hit || heads[static_cast<std::size_t>(w) * r + j] == 0;
      d1 += hit;
    }
    rep.graph_d1.push_back(d1);
    ++rep.graph_shapes[in_tree_shape(g, 0, k, size_cap)];
  }
  const std::uint64_t chunks = std::min<std::uint64_t>(trials, 64);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    Rng rng(derive_seed(seed, {1, c}));
    const std::uint64_t lo = c * trials / chunks, hi = (c + 1) * trials / chunks;
    for (std::uint64_t t = lo; t < hi; ++t) ++rep.gw_shapes[gw_tree_shape(r, k, size_cap, rng)];
  }
  double diff = 0.0;
  auto a = rep.graph_shapes.begin(), b = rep.gw_shapes.begin();
  const double inv = 1.0 / static_cast<double>(trials);
  while (a != rep.graph_shapes.end() || b != rep.gw_shapes.end()) {
    if (b == rep.gw_shapes.end() || (a != rep.graph_shapes.end() && a->first < b->first)) {
      diff += static_cast<double>(a->second) * inv;
      ++a;
    } else if (a == rep.graph_shapes.end() || b->first < a->first) {
      diff += static_cast<double>(b->second) * inv;
      ++b;
    } else {
      diff += std::fabs(static_cast<double>(a->second) - static_cast<double>(b->second)) * inv;
      ++a;
      ++b;
    }
  }
  rep.tv = 0.5 * diff;
  return rep;
}

}  // namespace rout
