#pragma once

// Text and JSON forms of a Digraph. Both are 1-based.
//
//   text:  n=<n> r=<r>
//          1: h1 h2 ... hr
//          2: ...
//   JSON:  {"n": n, "r": r, "heads": [h(1,1), ..., h(1,r), h(2,1), ...]}

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rout/digraph.hpp"
#include "rout/error.hpp"

namespace rout {

inline void write_text(std::ostream& os, const Digraph& g) {
  os << "n=" << g.n() << " r=" << g.r() << '\n';
  for (Vertex u = 0; u < g.n(); ++u) {
    os << (u + 1) << ':';
    for (Vertex h : g.out(u)) os << ' ' << (h + 1);
    os << '\n';
  }
}

inline std::string to_text(const Digraph& g) {
  std::ostringstream os;
  write_text(os, g);
  return os.str();
}

inline Digraph read_text(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("graph text: missing header line");
  unsigned long long n = 0, r = 0;
  if (std::sscanf(line.c_str(), "n=%llu r=%llu", &n, &r) != 2) {
    throw ConfigError("graph text: header must read 'n=<n> r=<r>', got '" + line + "'");
  }
  if (n == 0 || r == 0) throw ConfigError("graph text: n and r must be positive");
  std::vector<Vertex> heads(static_cast<std::size_t>(n * r));
  for (unsigned long long u = 0; u < n; ++u) {
    if (!std::getline(is, line)) throw ConfigError("graph text: missing line for vertex " + std::to_string(u + 1));
    std::istringstream ls(line);
    unsigned long long label = 0;
    char colon = 0;
    if (!(ls >> label >> colon) || colon != ':' || label != u + 1) {
      throw ConfigError("graph text: expected '" + std::to_string(u + 1) + ":' at start of line '" + line + "'");
    }
    for (unsigned long long j = 0; j < r; ++j) {
      unsigned long long h = 0;
      if (!(ls >> h) || h < 1 || h > n) {
        throw ConfigError("graph text: vertex " + std::to_string(u + 1) + " needs " + std::to_string(r) +
                          " heads in 1.." + std::to_string(n));
      }
      heads[u * r + j] = static_cast<Vertex>(h - 1);
    }
    std::string extra;
    if (ls >> extra) throw ConfigError("graph text: too many heads for vertex " + std::to_string(u + 1));
  }
  return Digraph(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r), std::move(heads));
}

inline nlohmann::json to_json(const Digraph& g) {
  std::vector<std::uint64_t> heads;
  heads.reserve(g.edge_count());
  for (Vertex h : g.heads()) heads.push_back(static_cast<std::uint64_t>(h) + 1);
  return {{"n", g.n()}, {"r", g.r()}, {"heads", std::move(heads)}};
}

inline Digraph digraph_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::uint32_t>();
    const auto r = j.at("r").get<std::uint32_t>();
    const auto& arr = j.at("heads");
    std::vector<Vertex> heads;
    heads.reserve(arr.size());
    for (const auto& h : arr) {
      const auto v = h.get<std::uint64_t>();
      if (v < 1 || v > n) throw ConfigError("graph json: head " + std::to_string(v) + " out of range");
      heads.push_back(static_cast<Vertex>(v - 1));
    }
    return Digraph(n, r, std::move(heads));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("graph json: ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("graph json: ") + e.what());
  }
}

}  // namespace rout
