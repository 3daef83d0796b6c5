// routsim: command-line front end for the rout library.
//
// Exit status: 0 success, 1 configuration / parameter error, 2 I/O error.
// Data goes to standard output or --out; diagnostics go to standard error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rout/bfs.hpp"
#include "rout/branching.hpp"
#include "rout/dfa.hpp"
#include "rout/diameter.hpp"
#include "rout/digraph.hpp"
#include "rout/digraph_io.hpp"
#include "rout/error.hpp"
#include "rout/flags.hpp"
#include "rout/harness.hpp"
#include "rout/scc.hpp"
#include "rout/stationary.hpp"

namespace {

using namespace rout;

struct Common {
  std::uint32_t n = 1000;
  std::uint32_t r = 2;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1;
  std::string format = "csv";
  std::string out;
  double eps = kDefaultEpsilon;
  double tol = kDefaultPowerTol;
  std::uint64_t max_iter = kDefaultPowerMaxIter;
  bool simple = false;
  std::string graph;  // read the graph from this text file instead of generating it
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "vertex count")->capture_default_str();
  app->add_option("--r", c.r, "out-degree")->capture_default_str();
  app->add_option("--seed", c.seed, "seed")->capture_default_str();
  app->add_option("--trials", c.trials, "trials")->capture_default_str();
  app->add_option("--format", c.format, "output format")->capture_default_str();
  app->add_option("--out", c.out, "output file (default: standard output)");
  app->add_option("--eps", c.eps, "flag epsilon")->capture_default_str();
  app->add_option("--tol", c.tol, "power iteration l1 tolerance")->capture_default_str();
  app->add_option("--max-iter", c.max_iter, "power iteration step cap")->capture_default_str();
  app->add_flag("--simple", c.simple, "sample a simple digraph (no loops, no parallel edges)");
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void require_format(const std::string& f, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (f == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError("--format must be one of: " + list);
}

Digraph obtain_graph(const Common& c) {
  if (!c.graph.empty()) {
    std::ifstream in(c.graph);
    if (!in) throw IoError("cannot read graph file '" + c.graph + "'");
    return read_text(in);
  }
  return c.simple ? generate_simple(c.n, c.r, Seed{c.seed}) : generate(c.n, c.r, Seed{c.seed});
}

std::string fmt(double x) { return detail::fmt12(x); }

// no seed applies to a graph read from a file
std::string seed_cell(const Common& c) { return c.graph.empty() ? std::to_string(c.seed) : ""; }
nlohmann::json seed_json(const Common& c) { return c.graph.empty() ? nlohmann::json(c.seed) : nlohmann::json(nullptr); }

int cmd_gen(const Common& c) {
  require_format(c.format, {"text", "json"});
  const Digraph g = obtain_graph(c);
  write_output(c.format == "json" ? to_json(g).dump() + "\n" : to_text(g), c.out);
  return 0;
}

int cmd_scc(const Common& c) {
  require_format(c.format, {"csv", "json"});
  const Digraph g = obtain_graph(c);
  const auto dec = scc_decompose(g);
  if (c.format == "json") {
    write_output(to_json(dec).dump() + "\n", c.out);
  } else {
    std::ostringstream os;
    os << "n,r,seed,components,d0_size,scc_frac,attractive,period\n"
       << g.n() << ',' << g.r() << ',' << seed_cell(c) << ',' << dec.comp_sizes.size() << ',' << dec.d0_size() << ','
       << fmt(double(dec.d0_size()) / g.n()) << ',' << (dec.attractive ? 1 : 0) << ',' << dec.period << '\n';
    write_output(os.str(), c.out);
  }
  return 0;
}

int cmd_diam(const Common& c) {
  require_format(c.format, {"csv", "json"});
  const Digraph g = obtain_graph(c);
  const auto dec = scc_decompose(g);
  const auto full = diameter(g);
  const auto d0 = diameter_restricted(g, dec.d0_vertices);
  if (c.format == "json") {
    nlohmann::json j{{"n", g.n()},
                     {"r", g.r()},
                     {"seed", seed_json(c)},
                     {"diam", full.value},
                     {"witness", {full.witness.first + 1, full.witness.second + 1}},
                     {"diam_d0", d0.value},
                     {"norm_diam", full.normalized},
                     {"norm_diam_d0", d0.normalized}};
    write_output(j.dump() + "\n", c.out);
  } else {
    std::ostringstream os;
    os << "n,r,seed,diam,diam_d0,norm_diam,norm_diam_d0\n"
       << g.n() << ',' << g.r() << ',' << seed_cell(c) << ',' << full.value << ',' << d0.value << ','
       << fmt(full.normalized) << ',' << fmt(d0.normalized) << '\n';
    write_output(os.str(), c.out);
  }
  return 0;
}

int cmd_stat(const Common& c, bool full_pi) {
  require_format(c.format, {"csv", "json"});
  if (!(c.tol > 0)) throw ConfigError("--tol must be positive");
  const Digraph g = obtain_graph(c);
  const auto dec = scc_decompose(g);
  const auto p = stationary_power(g, dec, c.tol, c.max_iter);
  if (!p.converged) std::cerr << "warning: power iteration stopped at --max-iter before reaching --tol\n";
  if (c.format == "json") {
    nlohmann::json j{{"n", g.n()},          {"r", g.r()},           {"seed", seed_json(c)},
                     {"pi_max", p.pi_max},  {"pi_min", p.pi_min},   {"exp_max", p.exp_max},
                     {"exp_min", p.exp_min}, {"residual", p.residual}, {"iters", p.iterations},
                     {"argmax", p.argmax + 1}, {"argmin", p.argmin + 1}, {"converged", p.converged}};
    if (full_pi) {
      nlohmann::json pi = nlohmann::json::object();
      for (std::size_t i = 0; i < p.support.size(); ++i) pi[std::to_string(p.support[i] + 1)] = p.pi[i];
      j["pi"] = pi;
    }
    write_output(j.dump() + "\n", c.out);
  } else {
    std::ostringstream os;
    os << "n,r,seed,pi_max,pi_min,exp_max,exp_min,residual,iters\n"
       << g.n() << ',' << g.r() << ',' << seed_cell(c) << ',' << fmt(p.pi_max) << ',' << fmt(p.pi_min) << ','
       << fmt(p.exp_max) << ',' << fmt(p.exp_min) << ',' << fmt(p.residual) << ',' << p.iterations << '\n';
    write_output(os.str(), c.out);
  }
  return 0;
}

int cmd_flags(const Common& c, std::optional<std::uint64_t> threshold, std::optional<std::uint64_t> size_cap) {
  require_format(c.format, {"csv"});
  const Digraph g = obtain_graph(c);
  const auto p = make_flag_params(g.n(), g.r(), c.eps, threshold, size_cap);
  const auto dec = scc_decompose(g);
  const auto flags = find_flags(g, p, &dec, detail::default_workers());
  std::cerr << "k_star=" << p.k_star << " threshold=" << p.threshold << " size_cap=" << p.size_cap
            << " flags=" << flags.size() << '\n';
  std::ostringstream os;
  write_flags_csv_header(os);
  write_flags_csv(os, g.n(), g.r(), c.seed, flags);
  write_output(os.str(), c.out);
  return 0;
}

int cmd_gw(const Common& c, std::uint32_t k, std::uint64_t omega, bool exact, bool constants) {
  require_format(c.format, {"csv"});
  std::ostringstream os;
  if (constants) {
    os << "r,lambda,eta\n";
    const auto cst = solve_constants(c.r);
    os << c.r << ',' << fmt(cst.lambda) << ',' << fmt(cst.eta) << '\n';
  } else {
    if (c.trials < 1) throw ConfigError("--trials must be >= 1");
    os << "r,k,omega,trials,estimate,stderr\n";
    if (exact) {
      os << c.r << ',' << k << ',' << omega << ",0," << fmt(gw_tail_prob_exact(c.r, k, omega)) << ",0\n";
    } else {
      const auto e = gw_tail_prob(c.r, k, omega, c.trials, Seed{c.seed}, detail::default_workers());
      os << c.r << ',' << k << ',' << omega << ',' << c.trials << ',' << fmt(e.estimate) << ',' << fmt(e.stderr_)
         << '\n';
    }
  }
  write_output(os.str(), c.out);
  return 0;
}

int cmd_dfa(const Common& c, const std::string& dfa_file, bool run) {
  Dfa d = [&] {
    if (dfa_file.empty()) return random_dfa(c.n, c.r, Seed{c.seed});
    std::ifstream in(dfa_file);
    if (!in) throw IoError("cannot read dfa file '" + dfa_file + "'");
    return read_dfa_text(in);
  }();
  if (run) {
    const auto w = read_word(std::cin, d.alphabet());
    const auto res = run_word(d, w);
    write_output("final=" + std::to_string(res.final_state + 1) + " accept=" + (res.accept ? "1" : "0") + "\n", c.out);
  } else {
    std::ostringstream os;
    write_dfa_text(os, d);
    write_output(os.str(), c.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random r-out digraphs: generation, structure, diameter, stationary law, flags, sweeps"};
  app.require_subcommand(1);

  Common gen_c, scc_c, diam_c, stat_c, flags_c, gw_c, dfa_c;
  auto* gen = app.add_subcommand("gen", "generate D(n, r) and print it");
  add_common(gen, gen_c);
  gen_c.format = "text";
  gen->get_option("--format")->default_str("text");

  auto* scc = app.add_subcommand("scc", "strongly connected components and D0");
  add_common(scc, scc_c);
  scc->add_option("--graph", scc_c.graph, "read the graph from a text file");

  auto* diam = app.add_subcommand("diam", "exact diameter of D and of D0");
  add_common(diam, diam_c);
  diam->add_option("--graph", diam_c.graph, "read the graph from a text file");

  bool full_pi = false;
  auto* stat = app.add_subcommand("stat", "stationary distribution on D0");
  add_common(stat, stat_c);
  stat->add_option("--graph", stat_c.graph, "read the graph from a text file");
  stat->add_flag("--full", full_pi, "include the whole vector (json)");

  std::optional<std::uint64_t> threshold, size_cap;
  auto* flags = app.add_subcommand("flags", "list epsilon-flags");
  add_common(flags, flags_c);
  flags->add_option("--graph", flags_c.graph, "read the graph from a text file");
  flags->add_option("--threshold", threshold, "in-layer threshold (default ceil(ln^4 n))");
  flags->add_option("--size-cap", size_cap, "maze size cap (default ceil(ln^7 n))");

  std::uint32_t gw_k = 8;
  std::uint64_t gw_omega = 4;
  bool gw_exact = false, gw_constants = false;
  auto* gw = app.add_subcommand("gw", "Poisson(r) Galton-Watson tail probabilities and constants");
  add_common(gw, gw_c);
  gw_c.trials = 100000;
  gw->get_option("--trials")->default_str("100000");
  gw->add_option("--k", gw_k, "generation")->capture_default_str();
  gw->add_option("--omega", gw_omega, "upper size bound")->capture_default_str();
  gw->add_flag("--exact", gw_exact, "use the distribution recursion instead of sampling");
  gw->add_flag("--constants", gw_constants, "print lambda_r and eta_r");

  std::string dfa_file;
  bool dfa_run = false;
  auto* dfa = app.add_subcommand("dfa", "random DFA; --run reads a word from standard input");
  add_common(dfa, dfa_c);
  dfa->add_option("--dfa", dfa_file, "read the DFA from a text file");
  dfa->add_flag("--run", dfa_run, "run a word of 1-based symbols read from standard input");

  std::string config_path, n_list, r_list, measurements;
  Common sw;
  auto* sweep = app.add_subcommand("sweep", "seeded Monte Carlo sweep over (n, r)");
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--n", n_list, "comma-separated vertex counts");
  sweep->add_option("--r", r_list, "comma-separated out-degrees");
  sweep->add_option("--seed", sw.seed, "master seed");
  sweep->add_option("--trials", sw.trials, "trials per (n, r)");
  sweep->add_option("--format", sw.format, "csv or json");
  sweep->add_option("--out", sw.out, "output file");
  sweep->add_option("--eps", sw.eps, "flag epsilon");
  sweep->add_option("--tol", sw.tol, "power iteration tolerance");
  sweep->add_option("--max-iter", sw.max_iter, "power iteration step cap");
  sweep->add_flag("--simple", sw.simple, "sample simple digraphs");
  sweep->add_option("--measurements", measurements, "comma-separated: scc, diam, stationary, flags, gw");
  bool timing = false;
  sweep->add_flag("--timing", timing, "add per-stage runtime columns (not reproducible)");
  unsigned workers = 0;
  sweep->add_option("--workers", workers, "parallel trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) return cmd_gen(gen_c);
    if (*scc) return cmd_scc(scc_c);
    if (*diam) return cmd_diam(diam_c);
    if (*stat) return cmd_stat(stat_c, full_pi);
    if (*flags) return cmd_flags(flags_c, threshold, size_cap);
    if (*gw) return cmd_gw(gw_c, gw_k, gw_omega, gw_exact, gw_constants);
    if (*dfa) return cmd_dfa(dfa_c, dfa_file, dfa_run);
    if (*sweep) {
      SweepConfig cfg = config_path.empty() ? SweepConfig{} : load_config(config_path);
      auto set = [&](const char* opt, const std::string& key, const std::string& value) {
        if (sweep->count(opt) > 0) apply_setting(cfg, key, value);
      };
      auto str = [](auto v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
      };
      set("--n", "n", n_list);
      set("--r", "r", r_list);
      set("--seed", "seed", str(sw.seed));
      set("--trials", "trials", str(sw.trials));
      set("--format", "format", sw.format);
      set("--out", "out", sw.out);
      set("--eps", "eps", str(sw.eps));
      set("--tol", "tol", str(sw.tol));
      set("--max-iter", "max_iter", str(sw.max_iter));
      set("--measurements", "measurements", measurements);
      set("--workers", "workers", str(workers));
      if (sw.simple) cfg.simple = true;
      if (timing) cfg.timing = true;
      validate(cfg);
      const auto recs = run_sweep(cfg);
      std::size_t failed = 0;
      for (const auto& r : recs) failed += !r.error.empty();
      if (failed) std::cerr << failed << " of " << recs.size() << " trials recorded errors\n";
      emit(recs, cfg.format, cfg.out, cfg.timing);
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
