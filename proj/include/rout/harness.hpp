#pragma once

// Seeded Monte Carlo sweeps over (n, r): one record per trial, emitted as CSV
// or JSON. Every value in a record is a function of (n, r, trial seed) only.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rout/branching.hpp"
#include "rout/diameter.hpp"
#include "rout/digraph.hpp"
#include "rout/error.hpp"
#include "rout/flags.hpp"
#include "rout/rng.hpp"
#include "rout/scc.hpp"
#include "rout/stationary.hpp"
#include "rout/stats.hpp"

namespace rout {

inline const std::vector<std::string>& known_measurements() {
  static const std::vector<std::string> names{"scc", "diam", "stationary", "flags", "gw"};
  return names;
}

struct SweepConfig {
  std::vector<std::uint32_t> n_values;
  std::vector<std::uint32_t> r_values;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> measurements{"scc"};
  std::string format = "csv";
  std::string out;  // empty: standard output
  double eps = kDefaultEpsilon;
  double tol = kDefaultPowerTol;
  std::uint64_t max_iter = kDefaultPowerMaxIter;
  std::optional<std::uint64_t> threshold;
  std::optional<std::uint64_t> size_cap;
  std::uint32_t gw_depth = 30;
  std::uint64_t pop_cap = kDefaultPopCap;
  bool simple = false;
  bool timing = false;  // adds runtime columns; output is then no longer reproducible
  unsigned workers = 1;

  bool wants(const std::string& m) const {
    return std::find(measurements.begin(), measurements.end(), m) != measurements.end();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t.empty() || t[0] == '-' || t[0] == '+') throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  try {
    std::size_t used = 0;
    const auto x = std::stoull(t, &used, 0);
    if (used != t.size()) throw std::invalid_argument(t);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  }
}

inline double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const std::string t = trim(v);
    const double x = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(x)) throw std::invalid_argument(t);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

inline std::vector<std::uint32_t> parse_u32_list(const std::string& key, const std::string& v) {
  std::vector<std::uint32_t> out;
  for (const auto& item : split_list(v)) {
    const auto x = parse_count(key, item);
    if (x > UINT32_MAX) throw ConfigError(key + ": " + item + " is too large");
    out.push_back(static_cast<std::uint32_t>(x));
  }
  return out;
}

}  // namespace detail

/// Parses `key = value` lines ('#' starts a comment) into a key -> value map.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(ss, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

/// Applies one setting; unknown keys and bad values raise ConfigError naming the key.
inline void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "n") cfg.n_values = parse_u32_list(key, value);
  else if (key == "r") cfg.r_values = parse_u32_list(key, value);
  else if (key == "trials") cfg.trials = parse_count(key, value);
  else if (key == "seed") cfg.seed = parse_count(key, value);
  else if (key == "measurements") cfg.measurements = split_list(value);
  else if (key == "format") cfg.format = trim(value);
  else if (key == "out") cfg.out = trim(value);
  else if (key == "eps") cfg.eps = parse_real(key, value);
  else if (key == "tol") cfg.tol = parse_real(key, value);
  else if (key == "max_iter" || key == "max-iter") cfg.max_iter = parse_count(key, value);
  else if (key == "threshold") cfg.threshold = parse_count(key, value);
  else if (key == "size_cap") cfg.size_cap = parse_count(key, value);
  else if (key == "gw_depth") cfg.gw_depth = static_cast<std::uint32_t>(parse_count(key, value));
  else if (key == "pop_cap") cfg.pop_cap = parse_count(key, value);
  else if (key == "simple") cfg.simple = parse_bool(key, value);
  else if (key == "timing") cfg.timing = parse_bool(key, value);
  else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_count(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

inline void apply_settings(SweepConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
}

inline SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  SweepConfig cfg;
  apply_settings(cfg, parse_config_text(ss.str()));
  return cfg;
}

/// Checks every field; the message names the offending one.
inline void validate(const SweepConfig& cfg) {
  if (cfg.n_values.empty()) throw ConfigError("n: list is empty");
  if (cfg.r_values.empty()) throw ConfigError("r: list is empty");
  if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
  if (cfg.measurements.empty()) throw ConfigError("measurements: list is empty");
  for (auto n : cfg.n_values) {
    if (n < 1) throw ConfigError("n: values must be >= 1");
  }
  for (auto r : cfg.r_values) {
    if (r < 1) throw ConfigError("r: values must be >= 1");
  }
  for (const auto& m : cfg.measurements) {
    const auto& k = known_measurements();
    if (std::find(k.begin(), k.end(), m) == k.end()) {
      throw ConfigError("measurements: unknown measurement '" + m + "' (known: scc, diam, stationary, flags, gw)");
    }
  }
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format: must be csv or json");
  if (!(cfg.eps > 0.0)) throw ConfigError("eps: must be positive");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol: must be positive");
  if (cfg.max_iter < 1) throw ConfigError("max_iter: must be >= 1");
  if (cfg.threshold && *cfg.threshold < 1) throw ConfigError("threshold: must be >= 1");
  if (cfg.size_cap && *cfg.size_cap < 1) throw ConfigError("size_cap: must be >= 1");
  if (cfg.workers < 1) throw ConfigError("workers: must be >= 1");
}

struct TrialRecord {
  std::uint32_t n = 0;
  std::uint32_t r = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> scc_frac;
  std::optional<std::uint64_t> d0_size;
  std::optional<bool> attractive;
  std::optional<std::uint64_t> period;
  std::optional<std::uint64_t> diam;
  std::optional<std::uint64_t> diam_d0;
  std::optional<double> norm_diam;
  std::optional<double> pi_max;
  std::optional<double> pi_min;
  std::optional<double> exp_max;
  std::optional<double> exp_min;
  std::optional<double> residual;
  std::optional<std::uint64_t> flag_count;
  std::optional<std::uint64_t> flags_in_d0;
  std::optional<bool> gw_extinct;
  std::string error;
  std::map<std::string, double> runtime_ms;  // per stage, only emitted with timing on

  bool operator==(const TrialRecord&) const = default;
};

/// Per-trial seed: derive_seed(master, {n, r, trial}).
inline Seed trial_seed(std::uint64_t master, std::uint32_t n, std::uint32_t r, std::uint64_t trial) {
  return derive_seed(Seed{master}, {n, r, trial});
}

/// Runs the configured measurements on one graph. A failing measurement adds
/// "<name>: <message>" to the error field and leaves its columns empty.
inline TrialRecord measure(const Digraph& g, const SweepConfig& cfg, std::uint64_t trial, Seed seed,
                           unsigned diam_workers = 1) {
  TrialRecord rec;
  rec.n = g.n();
  rec.r = g.r();
  rec.trial = trial;
  rec.seed = seed.value;
  auto fail = [&](const std::string& what, const std::string& msg) {
    if (!rec.error.empty()) rec.error += "; ";
    rec.error += what + ": " + msg;
  };
  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const std::exception& e) {
      fail(name, e.what());
    } catch (...) {
      fail(name, "unknown failure");
    }
    if (cfg.timing) {
      rec.runtime_ms[name] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  std::optional<SccDecomposition> dec;
  auto need_dec = [&]() -> const SccDecomposition& {
    if (!dec) dec = scc_decompose(g);
    return *dec;
  };
  const double log_r_n = g.r() > 1 && g.n() > 1 ? std::log(double(g.n())) / std::log(double(g.r())) : 0.0;
  if (cfg.wants("scc")) {
    stage("scc", [&] {
      const auto& d = need_dec();
      rec.d0_size = d.d0_size();
      rec.scc_frac = static_cast<double>(d.d0_size()) / g.n();
      rec.attractive = d.attractive;
      rec.period = d.period;
    });
  }
  if (cfg.wants("diam")) {
    stage("diam", [&] {
      const auto rep = diameter(g, diam_workers);
      rec.diam = rep.value;
      if (log_r_n > 0.0) rec.norm_diam = rep.value / log_r_n;
      rec.diam_d0 = diameter_restricted(g, need_dec().d0_vertices, diam_workers).value;
    });
  }
  if (cfg.wants("stationary")) {
    stage("stationary", [&] {
      const auto prof = stationary_power(g, need_dec(), cfg.tol, cfg.max_iter);
      if (!prof.converged) throw LimitError("power iteration did not converge in " + std::to_string(cfg.max_iter) + " steps");
      rec.pi_max = prof.pi_max;
      rec.pi_min = prof.pi_min;
      rec.residual = prof.residual;
      if (g.n() > 1) {
        rec.exp_max = prof.exp_max;
        rec.exp_min = prof.exp_min;
      }
    });
  }
  if (cfg.wants("flags")) {
    stage("flags", [&] {
      const auto p = make_flag_params(g.n(), g.r(), cfg.eps, cfg.threshold, cfg.size_cap);
      const auto flags = find_flags(g, p, &need_dec());
      rec.flag_count = flags.size();
      rec.flags_in_d0 = std::count_if(flags.begin(), flags.end(), [](const FlagReport& f) { return f.in_d0; });
    });
  }
  if (cfg.wants("gw")) {
    stage("gw", [&] {
      const auto s = gw_sample(g.r(), cfg.gw_depth, cfg.pop_cap, derive_seed(seed, {2}));
      // a tree that outgrew the population cap dies out with probability q^cap, i.e. never
      rec.gw_extinct = !s.truncated && s.generation_sizes.back() == 0;
    });
  }
  return rec;
}

/// All (n, r, trial) cells, sorted by (n, r, trial). Graph for trial t is
/// generate(n, r, trial_seed(...)), or generate_simple with the same seed.
inline std::vector<TrialRecord> run_sweep(SweepConfig cfg) {
  validate(cfg);
  std::sort(cfg.n_values.begin(), cfg.n_values.end());
  cfg.n_values.erase(std::unique(cfg.n_values.begin(), cfg.n_values.end()), cfg.n_values.end());
  std::sort(cfg.r_values.begin(), cfg.r_values.end());
  cfg.r_values.erase(std::unique(cfg.r_values.begin(), cfg.r_values.end()), cfg.r_values.end());
  struct Task {
    std::uint32_t n, r;
    std::uint64_t trial;
  };
  std::vector<Task> tasks;
  for (auto n : cfg.n_values) {
    for (auto r : cfg.r_values) {
      for (std::uint64_t t = 0; t < cfg.trials; ++t) tasks.push_back({n, r, t});
    }
  }
  std::vector<TrialRecord> out(tasks.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(tasks.size())));
  const unsigned diam_workers = workers == 1 ? detail::default_workers() : 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      const auto& tk = tasks[i];
      const Seed s = trial_seed(cfg.seed, tk.n, tk.r, tk.trial);
      try {
        const Digraph g = cfg.simple ? generate_simple(tk.n, tk.r, s) : generate(tk.n, tk.r, s);
        out[i] = measure(g, cfg, tk.trial, s, diam_workers);
      } catch (const std::exception& e) {
        TrialRecord rec;
        rec.n = tk.n;
        rec.r = tk.r;
        rec.trial = tk.trial;
        rec.seed = s.value;
        rec.error = std::string("generate: ") + e.what();
        out[i] = std::move(rec);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{
      "n",        "r",      "trial",   "seed",    "scc_frac", "d0_size",    "attractive",  "period",
      "diam",     "diam_d0", "norm_diam", "pi_max", "pi_min", "exp_max",   "exp_min",     "residual",
      "flag_count", "flags_in_d0", "gw_extinct", "error"};
  return cols;
}

namespace detail {

inline std::string fmt12(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Cells in record_columns() order; empty string for missing values.
inline std::vector<std::string> record_cells(const TrialRecord& r) {
  auto u = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
  auto d = [](const std::optional<double>& v) { return v ? fmt12(*v) : std::string(); };
  auto b = [](const std::optional<bool>& v) { return v ? std::string(*v ? "1" : "0") : std::string(); };
  return {std::to_string(r.n), std::to_string(r.r), std::to_string(r.trial), std::to_string(r.seed),
          d(r.scc_frac),       u(r.d0_size),        b(r.attractive),         u(r.period),
          u(r.diam),           u(r.diam_d0),        d(r.norm_diam),          d(r.pi_max),
          d(r.pi_min),         d(r.exp_max),        d(r.exp_min),            d(r.residual),
          u(r.flag_count),     u(r.flags_in_d0),    b(r.gw_extinct),         r.error};
}

inline std::vector<std::string> timing_columns(const std::vector<TrialRecord>& recs) {
  std::vector<std::string> names;
  for (const auto& r : recs) {
    for (const auto& [k, v] : r.runtime_ms) {
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

inline void set_field(TrialRecord& r, const std::string& col, const std::string& v) {
  auto u = [&](std::optional<std::uint64_t>& f) { f = v.empty() ? std::nullopt : std::optional(parse_count(col, v)); };
  auto d = [&](std::optional<double>& f) { f = v.empty() ? std::nullopt : std::optional(parse_real(col, v)); };
  auto b = [&](std::optional<bool>& f) { f = v.empty() ? std::nullopt : std::optional(parse_bool(col, v)); };
  if (col == "n") r.n = static_cast<std::uint32_t>(parse_count(col, v));
  else if (col == "r") r.r = static_cast<std::uint32_t>(parse_count(col, v));
  else if (col == "trial") r.trial = parse_count(col, v);
  else if (col == "seed") r.seed = parse_count(col, v);
  else if (col == "scc_frac") d(r.scc_frac);
  else if (col == "d0_size") u(r.d0_size);
  else if (col == "attractive") b(r.attractive);
  else if (col == "period") u(r.period);
  else if (col == "diam") u(r.diam);
  else if (col == "diam_d0") u(r.diam_d0);
  else if (col == "norm_diam") d(r.norm_diam);
  else if (col == "pi_max") d(r.pi_max);
  else if (col == "pi_min") d(r.pi_min);
  else if (col == "exp_max") d(r.exp_max);
  else if (col == "exp_min") d(r.exp_min);
  else if (col == "residual") d(r.residual);
  else if (col == "flag_count") u(r.flag_count);
  else if (col == "flags_in_d0") u(r.flags_in_d0);
  else if (col == "gw_extinct") b(r.gw_extinct);
  else if (col == "error") r.error = v;
  else if (col.starts_with("ms_")) {
    if (!v.empty()) r.runtime_ms[col.substr(3)] = parse_real(col, v);
  } else {
    throw ConfigError("unknown column '" + col + "'");
  }
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& recs, bool timing = false) {
  const auto cols = record_columns();
  const auto tcols = timing ? detail::timing_columns(recs) : std::vector<std::string>{};
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  for (const auto& t : tcols) os << ",ms_" << t;
  os << '\n';
  for (const auto& r : recs) {
    const auto cells = detail::record_cells(r);
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << detail::csv_safe(cells[i]);
    for (const auto& t : tcols) {
      const auto it = r.runtime_ms.find(t);
      os << ',' << (it == r.runtime_ms.end() ? "" : detail::fmt12(it->second));
    }
    os << '\n';
  }
}

inline void write_json(std::ostream& os, const std::vector<TrialRecord>& recs, bool timing = false) {
  const auto cols = record_columns();
  const auto tcols = timing ? detail::timing_columns(recs) : std::vector<std::string>{};
  os << "[\n";
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto cells = detail::record_cells(recs[k]);
    os << "  {";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      os << (i ? ", " : "") << '"' << cols[i] << "\": ";
      if (cols[i] == "error") os << nlohmann::json(cells[i]).dump();
      else os << (cells[i].empty() ? "null" : cells[i]);
    }
    for (const auto& t : tcols) {
      const auto it = recs[k].runtime_ms.find(t);
      os << ", \"ms_" << t << "\": " << (it == recs[k].runtime_ms.end() ? "null" : detail::fmt12(it->second));
    }
    os << '}' << (k + 1 < recs.size() ? "," : "") << '\n';
  }
  os << "]\n";
}

inline std::string emit_string(const std::vector<TrialRecord>& recs, const std::string& format, bool timing = false) {
  std::ostringstream os;
  if (format == "csv") write_csv(os, recs, timing);
  else if (format == "json") write_json(os, recs, timing);
  else throw ConfigError("format: must be csv or json");
  return os.str();
}

/// Writes records to path, or to standard output when path is empty.
inline void emit(const std::vector<TrialRecord>& recs, const std::string& format, const std::string& path,
                 bool timing = false) {
  if (recs.empty()) throw ParameterError("emit: no records");
  const std::string text = emit_string(recs, format, timing);
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

inline std::vector<TrialRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("csv: missing header");
  const auto header = detail::split_csv_line(line);
  std::vector<TrialRecord> recs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) throw ConfigError("csv: row has " + std::to_string(cells.size()) + " cells");
    TrialRecord r;
    for (std::size_t i = 0; i < cells.size(); ++i) detail::set_field(r, header[i], cells[i]);
    recs.push_back(std::move(r));
  }
  return recs;
}

inline std::vector<TrialRecord> parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("json: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("json: expected an array of records");
  std::vector<TrialRecord> recs;
  for (const auto& o : j) {
    TrialRecord r;
    for (const auto& [k, v] : o.items()) {
      std::string cell;
      if (v.is_null()) cell = "";
      else if (v.is_string()) cell = v.get<std::string>();
      else if (v.is_number_unsigned()) cell = std::to_string(v.get<std::uint64_t>());
      else if (v.is_number_integer()) cell = std::to_string(v.get<std::int64_t>());
      else cell = detail::fmt12(v.get<double>());
      detail::set_field(r, k, cell);
    }
    recs.push_back(std::move(r));
  }
  return recs;
}

// ---------------------------------------------------------------------------
// Constant estimation

struct CellSummary {
  std::uint32_t n = 0;
  std::size_t records = 0;
  stats::Summary scc_frac, norm_diam, exp_max, exp_min;
};

struct ConstantsSummary {
  std::uint32_t r = 0;
  std::optional<ModelConstants> reference;  // absent for r = 1
  std::vector<CellSummary> cells;           // ascending n
  // Gaps at the largest n: observed minus reference (lambda_r, 1 + eta_r, 1, 1 + eta_r).
  std::optional<double> scc_gap, diam_gap, exp_max_gap, exp_min_gap;
  std::vector<std::string> insufficient;  // statistics with no data at some n
};

inline std::vector<ConstantsSummary> estimate_constants(const std::vector<TrialRecord>& recs) {
  if (recs.empty()) throw ParameterError("estimate_constants: no records");
  std::map<std::uint32_t, std::map<std::uint32_t, std::vector<const TrialRecord*>>> by_r;
  for (const auto& rec : recs) by_r[rec.r][rec.n].push_back(&rec);
  std::vector<ConstantsSummary> out;
  for (const auto& [r, by_n] : by_r) {
    if (by_n.size() < 2) {
      throw ParameterError("estimate_constants: r=" + std::to_string(r) + " has records for only one n");
    }
    ConstantsSummary s;
    s.r = r;
    if (r >= 2) s.reference = solve_constants(r);
    auto note = [&](const std::string& what, std::uint32_t n) {
      s.insufficient.push_back(what + " at n=" + std::to_string(n));
    };
    for (const auto& [n, list] : by_n) {
      std::vector<double> a, b, c, d;
      for (const auto* rec : list) {
        if (rec->scc_frac) a.push_back(*rec->scc_frac);
        if (rec->norm_diam) b.push_back(*rec->norm_diam);
        if (rec->exp_max) c.push_back(*rec->exp_max);
        if (rec->exp_min) d.push_back(*rec->exp_min);
      }
      if (a.empty()) note("scc_frac", n);
      if (b.empty()) note("norm_diam", n);
      if (c.empty()) note("exp_max", n);
      if (d.empty()) note("exp_min", n);
      s.cells.push_back({n, list.size(), stats::summarize(a), stats::summarize(b), stats::summarize(c),
                         stats::summarize(d)});
    }
    const auto& last = s.cells.back();
    if (s.reference) {
      const double lam = s.reference->lambda, one_eta = 1.0 + s.reference->eta;
      if (last.scc_frac.count) s.scc_gap = last.scc_frac.mean - lam;
      if (last.norm_diam.count) s.diam_gap = last.norm_diam.median - one_eta;
      if (last.exp_max.count) s.exp_max_gap = last.exp_max.mean - 1.0;
      if (last.exp_min.count) s.exp_min_gap = last.exp_min.mean - one_eta;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rout
