// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// a subset, e.g. `acceptance 1 5 9`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rout/bfs.hpp"
#include "rout/branching.hpp"
#include "rout/dfa.hpp"
#include "rout/diameter.hpp"
#include "rout/flags.hpp"
#include "rout/harness.hpp"
#include "rout/scc.hpp"
#include "rout/stationary.hpp"
#include "rout/stats.hpp"

using namespace rout;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> xs) { return stats::summarize(std::move(xs)).median; }

double mean(const std::vector<double>& xs) { return stats::summarize(xs).mean; }

// Every ergodic instance built by any criterion is checked against the pi_min bound.
std::uint64_t g_pimin_checked = 0, g_pimin_violations = 0;

void record_pimin(const Digraph& g, const SccDecomposition& dec, const StationaryProfile& p) {
  ++g_pimin_checked;
  if (!validate_pimin_bound(p, diameter_restricted(g, dec.d0_vertices).value, g.r()).ok) ++g_pimin_violations;
}

Outcome constants() {
  double worst_res = 0, worst_dual = 0;
  for (std::uint32_t r = 2; r <= 64; ++r) {
    const auto c = solve_constants(r);
    worst_res = std::max(worst_res, c.residual);
    worst_dual = std::max(worst_dual, std::fabs(c.eta - c.eta_alt));
  }
  const double lam = solve_constants(2).lambda;
  const double err = std::fabs(lam - static_cast<double>(oracle::lambda_bisect(2)));
  return {worst_res <= 1e-13 && worst_dual <= 1e-10 && err <= 1e-6 && std::fabs(lam - 0.796812) < 1e-6,
          fmt("max residual %.2e, max dual gap %.2e, lambda_2=%.9f (oracle gap %.2e)", worst_res, worst_dual, lam,
              err)};
}

Outcome giant_scc() {
  const std::uint32_t n = 100000;
  std::vector<double> frac;
  int good = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto dec = scc_decompose(generate(n, 2, trial_seed(2, n, 2, s)));
    frac.push_back(double(dec.d0_size()) / n);
    good += dec.attractive && dec.period == 1;
  }
  const double lam = solve_constants(2).lambda;
  const double m = mean(frac);
  return {std::fabs(m - lam) <= 0.01 && good >= 19,
          fmt("mean |D0|/n=%.5f (lambda_2=%.5f), attractive and aperiodic in %d/20", m, lam, good)};
}

Outcome diameter_trend() {
  std::vector<double> med;
  bool bound_ok = true;
  std::string sizes;
  for (std::uint32_t e : {12u, 14u, 16u}) {
    const std::uint32_t n = 1u << e;
    std::vector<double> ratio;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto g = generate(n, 2, trial_seed(3, n, 2, s));
      const auto d = diameter(g);
      bound_ok = bound_ok && d.value >= std::ceil(std::log2(n - 1.0));
      ratio.push_back(d.value / double(e));
    }
    med.push_back(median(ratio));
    sizes += fmt(" 2^%u:%.4f", e, med.back());
  }
  const bool trend = med[1] <= med[0] && med[2] <= med[1];
  const bool window = med[2] >= 1.55 && med[2] <= 2.05;
  return {trend && window && bound_ok,
          "median diam/log2 n" + sizes + (bound_ok ? ", lower bound held" : ", LOWER BOUND VIOLATED")};
}

Outcome stationary_extremes() {
  bool floor_ok = true;
  std::vector<double> emax15, emin15, emin12;
  for (std::uint32_t e : {12u, 15u}) {
    const std::uint32_t n = 1u << e;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto g = generate(n, 2, trial_seed(4, n, 2, s));
      const auto dec = scc_decompose(g);
      if (!is_closed(g, dec)) continue;
      const auto p = stationary_power(g, dec);
      floor_ok = floor_ok && p.pi_max >= 1.0 / n;
      record_pimin(g, dec, p);
      if (e == 15) {
        emax15.push_back(p.exp_max);
        emin15.push_back(p.exp_min);
      } else {
        emin12.push_back(p.exp_min);
      }
    }
  }
  const double target = 1.0 + solve_constants(2).eta;
  const double mx = mean(emax15), mn = mean(emin15), mn12 = mean(emin12);
  const bool pass = floor_ok && emax15.size() >= 19 && mx >= 0.80 && mx <= 1.00 && mn >= 1.4 && mn <= 2.1 &&
                    std::fabs(mn - target) < std::fabs(mn12 - target);
  return {pass, fmt("pi_max>=1/n %s; n=2^15 over %zu seeds: exp_max=%.4f exp_min=%.4f; exp_min at 2^12=%.4f "
                    "(target %.4f)",
                    floor_ok ? "always" : "VIOLATED", emax15.size(), mx, mn, mn12, target)};
}

Outcome solver() {
  double worst_res = 0, worst_l1 = 0;
  int done = 0;
  for (std::uint64_t s = 0; done < 50; ++s) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(s * 53 % 499);
    const auto g = generate(n, 2, trial_seed(5, n, 2, s));
    const auto dec = scc_decompose(g);
    if (!is_closed(g, dec)) continue;
    const auto p = stationary_power(g, dec);
    const auto d = stationary_direct(g, dec);
    double l1 = 0;
    for (std::size_t i = 0; i < p.pi.size(); ++i) l1 += std::fabs(p.pi[i] - d.pi[i]);
    worst_l1 = std::max(worst_l1, l1);
    worst_res = std::max({worst_res, p.residual, d.residual});
    record_pimin(g, dec, p);
    ++done;
  }
  const Digraph chain(2, 2, {0, 1, 0, 0});
  const auto cd = scc_decompose(chain);
  const auto cp = stationary_direct(chain, cd);
  const bool exact = std::fabs(cp.at(0) - 2.0 / 3.0) <= 1e-15 && std::fabs(cp.at(1) - 1.0 / 3.0) <= 1e-15;
  return {worst_res <= 1e-10 && worst_l1 <= 1e-8 && exact,
          fmt("max residual %.2e, max power/direct l1 %.2e over 50 instances, chain pi=(%.16f, %.16f)", worst_res,
              worst_l1, cp.at(0), cp.at(1))};
}

Outcome pimin_bound() {
  const Digraph chain(2, 2, {0, 1, 0, 0});
  const auto cd = scc_decompose(chain);
  const auto cp = stationary_direct(chain, cd);
  const auto c = validate_pimin_bound(cp, diameter(chain).value, 2);
  // extra ergodic instances of mixed size and degree
  for (std::uint64_t s = 0; s < 40; ++s) {
    const std::uint32_t n = 50 + static_cast<std::uint32_t>(s * 97 % 1500), r = 2 + s % 3;
    const auto g = generate(n, r, trial_seed(6, n, r, s));
    const auto dec = scc_decompose(g);
    if (is_closed(g, dec)) record_pimin(g, dec, stationary_power(g, dec));
  }
  const bool tight = c.ok && std::fabs(c.slack) <= 1e-15;
  return {g_pimin_violations == 0 && tight,
          fmt("%llu violations over %llu ergodic instances; chain bound %.6f vs pi_min %.6f",
              (unsigned long long)g_pimin_violations, (unsigned long long)g_pimin_checked, c.bound, c.pi_min)};
}

Outcome pimax_bound() {
  const std::uint32_t n = 1000;
  const auto k = static_cast<std::uint32_t>(std::ceil(std::log(std::log(double(n)))));
  std::uint64_t checks = 0, violations = 0, mazes = 0, mismatches = 0;
  double worst = 0;
  int instances = 0;
  for (std::uint64_t s = 0; instances < 100; ++s) {
    const auto g = generate(n, 2, trial_seed(7, n, 2, s));
    const auto dec = scc_decompose(g);
    if (!is_closed(g, dec)) continue;
    ++instances;
    const auto p = stationary_power(g, dec);
    record_pimin(g, dec, p);
    for (Vertex v : dec.d0_vertices) {
      const auto mz = build_maze(g, v, k);
      if (mz.entrance.empty()) continue;
      const auto h = maze_hardness(g, v, k);
      const auto chk = validate_pimax_bound(p, h, escape_probability(g, v, k), 2);
      ++checks;
      worst = std::max(worst, chk.lhs);
      violations += !chk.ok;
      if (mz.vertices.size() <= 12) {
        ++mazes;
        mismatches += h.h != oracle::hardness_by_paths(g, v, mz.vertices, mz.entrance);
      }
    }
  }
  return {violations == 0 && mismatches == 0 && mazes > 0,
          fmt("k=%u: %llu violations over %llu (v, maze) checks, max lhs %.4f; hardness matched path enumeration "
              "on %llu/%llu small mazes",
              k, (unsigned long long)violations, (unsigned long long)checks, worst,
              (unsigned long long)(mazes - mismatches), (unsigned long long)mazes)};
}

Outcome coupling() {
  const std::uint32_t n = 10000;
  const auto rep = coupling_tv(n, 2, 2, 100000, Seed{8});
  const double p_stated = 1.0 - std::pow(1.0 - 1.0 / (n - 1.0), 2);
  const double p_exact = 1.0 - std::pow(1.0 - 1.0 / double(n), 2);
  // reference: TV between two independent tree-law samples of the same size
  std::map<ShapeCode, std::uint64_t> a, b;
  Rng ra(Seed{81}), rb(Seed{82});
  for (std::uint64_t t = 0; t < rep.trials; ++t) {
    ++a[gw_tree_shape(2, 2, rep.size_cap, ra)];
    ++b[gw_tree_shape(2, 2, rep.size_cap, rb)];
  }
  double null_diff = 0;
  for (const auto& [code, c] : a) {
    const auto it = b.find(code);
    null_diff += std::fabs(double(c) - (it == b.end() ? 0.0 : double(it->second)));
  }
  for (const auto& [code, c] : b) null_diff += a.count(code) ? 0.0 : double(c);
  const double null_tv = 0.5 * null_diff / double(rep.trials);
  const double crit = stats::ks_critical(rep.graph_d1.size(), 1e-3);
  const double ks_stated =
      stats::ks_statistic(rep.graph_d1, [&](std::uint64_t k) { return stats::binomial_cdf(n - 1, p_stated, k); });
  const double ks_exact =
      stats::ks_statistic(rep.graph_d1, [&](std::uint64_t k) { return stats::binomial_cdf(n - 1, p_exact, k); });
  return {rep.tv <= 0.02 && ks_stated < crit,
          fmt("TV=%.4f (shape cap %llu, %zu/%zu shapes; tree-vs-tree noise floor %.4f); d1 KS %.5f vs Bin(n-1,1-(1-1/(n-1))^2), %.5f vs "
              "Bin(n-1,1-(1-1/n)^2), critical %.5f",
              rep.tv, (unsigned long long)rep.size_cap, rep.graph_shapes.size(), rep.gw_shapes.size(), null_tv, ks_stated,
              ks_exact, crit)};
}

Outcome decay_rate() {
  const double rho = 2 * solve_constants(2).extinction;
  const std::uint64_t trees = 1'000'000;
  // one simulation of 10^6 trees, tail frequency recorded at every k
  std::vector<std::uint64_t> hits(15, 0);
  Rng rng(Seed{9});
  for (std::uint64_t t = 0; t < trees; ++t) {
    std::uint64_t z = 1;
    for (std::uint32_t k = 1; k <= 14 && z > 0; ++k) {
      z = sample_poisson(rng, 2.0 * double(z));
      if (z > 0 && z < 4) ++hits[k];
    }
  }
  bool ratios_ok = true, mc_ok = true;
  std::string exact_r, mc_r;
  for (std::uint32_t k = 8; k <= 14; ++k) {
    const double pk = gw_tail_prob_exact(2, k, 4), pk1 = gw_tail_prob_exact(2, k - 1, 4);
    const double ratio = pk / pk1;
    ratios_ok = ratios_ok && std::fabs(ratio - rho) <= 0.2 * rho;
    const double f = double(hits[k]) / trees;
    mc_ok = mc_ok && std::fabs(f - pk) <= 3 * stats::bernoulli_se(pk, trees);
    exact_r += fmt(" %.4f", ratio);
    mc_r += hits[k - 1] ? fmt(" %.3f", double(hits[k]) / double(hits[k - 1])) : " -";
  }
  return {ratios_ok && mc_ok, "exact ratios k=8..14:" + exact_r + fmt(" (target %.4f)", rho) +
                                  "; 10^6-tree tails within 3 SE of the exact law: " + (mc_ok ? "yes" : "NO") +
                                  "; raw simulated ratios:" + mc_r};
}

Outcome loop_law() {
  const std::uint32_t n = 50;
  const std::uint64_t trials = 100000;
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < trials; ++s) hits += !loop_vertices(generate(n, 2, trial_seed(10, n, 2, s))).empty();
  const double p = 1.0 - std::pow(1.0 - 1.0 / (double(n) * n), n);
  const double f = double(hits) / trials, se = stats::bernoulli_se(p, trials);
  return {std::fabs(f - p) <= 3 * se, fmt("frequency %.5f vs formula %.5f (SE %.5f)", f, p, se)};
}

Outcome flags() {
  const std::uint32_t n = 1u << 16;
  const auto p = make_flag_params(n, 2, 0.2);
  int seeds_with_flags = 0;
  std::uint64_t total = 0, in_d0 = 0, hard_ok = 0, link_ok = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = generate(n, 2, trial_seed(11, n, 2, s));
    const auto dec = scc_decompose(g);
    const auto found = find_flags(g, p, &dec);
    if (found.empty()) continue;
    ++seeds_with_flags;
    std::optional<StationaryProfile> prof;
    if (is_closed(g, dec)) prof = stationary_power(g, dec);
    for (const auto& f : found) {
      ++total;
      in_d0 += f.in_d0;
      hard_ok += maze_hardness(g, f.vertex, *f.k1).h == *f.k1;
      link_ok += prof && validate_flag_linkage(g, *prof, f.vertex, p.k_star).ok;
    }
  }
  const bool pass = seeds_with_flags > 10 && total > 0 && double(in_d0) >= 0.95 * double(total) && hard_ok == total &&
                    link_ok == total;
  return {pass, fmt("k*=%u threshold=%llu size cap=%llu: flags in %d/20 seeds, %llu flags total, %llu in D0",
                    p.k_star, (unsigned long long)p.threshold, (unsigned long long)p.size_cap, seeds_with_flags,
                    (unsigned long long)total, (unsigned long long)in_d0)};
}

Outcome dfa() {
  bool identical = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto d = random_dfa(100, 2, Seed{1200 + s});
    Rng a(Seed{s}), b(Seed{s});
    identical = identical && word_trajectory(d, sample_word(2, 50, a)) == random_walk(d, 50, b);
  }
  const auto d = random_dfa(100, 2, Seed{12});
  const std::uint64_t T = 100000;
  const auto law = uniform_word_visit_law(d, 50, T, Seed{13});
  const auto exact = walk_law(d, 50);
  double tv = 0, envelope = 0;
  for (std::size_t v = 0; v < exact.size(); ++v) {
    tv += 0.5 * std::fabs(law.freq[v] - exact[v]);
    envelope += 0.5 * 3 * std::sqrt(exact[v] * (1 - exact[v]) / double(T));
  }
  return {identical && tv <= envelope,
          fmt("trajectories identical: %s; TV(sampled, exact)=%.5f, 3-SE envelope %.5f", identical ? "yes" : "NO", tv,
              envelope)};
}

Outcome reproducibility() {
  SweepConfig cfg;
  cfg.n_values = {300, 1000};
  cfg.r_values = {2, 3};
  cfg.trials = 4;
  cfg.seed = 13;
  cfg.measurements = {"scc", "diam", "stationary", "flags", "gw"};
  cfg.threshold = 8;
  const auto a = emit_string(run_sweep(cfg), "csv");
  const auto b = emit_string(run_sweep(cfg), "csv");
  cfg.workers = 3;
  const auto c = emit_string(run_sweep(cfg), "csv");
  const auto j1 = emit_string(run_sweep(cfg), "json");
  const auto j2 = emit_string(run_sweep(cfg), "json");
  return {a == b && a == c && j1 == j2, fmt("%zu-byte CSV identical across re-runs and worker counts: %s", a.size(),
                                            a == b && a == c && j1 == j2 ? "yes" : "NO")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> all = {
      {1, constants},  {2, giant_scc}, {3, diameter_trend}, {4, stationary_extremes}, {5, solver},
      {6, pimin_bound}, {7, pimax_bound}, {8, coupling},     {9, decay_rate},          {10, loop_law},
      {11, flags},      {12, dfa},       {13, reproducibility}};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& [id, fn] : all) {
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
