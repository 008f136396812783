#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "caselasso/error.hpp"
#include "caselasso/io/csv.hpp"
#include "caselasso/simulate.hpp"

// Simulation configs: `key = value` lines, '#' starts a comment. A line
// `[run]` starts another configuration that inherits nothing.
namespace caselasso::io {

namespace detail {

template <class T>
T parse_integer(std::string_view s, const std::string& key, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("line " + std::to_string(line) + ": key '" + key + "' needs an integer, got '" +
                     std::string(s) + "'");
  return v;
}

inline void assign(sim::SimConfig& c, const std::string& key, std::string_view value, std::size_t line) {
  auto real = [&] { return parse_number(value, line, 1); };
  if (key == "n") c.n = parse_integer<Index>(value, key, line);
  else if (key == "p") c.p = parse_integer<Index>(value, key, line);
  else if (key == "a") c.a = real();
  else if (key == "b") c.b = real();
  else if (key == "q") c.q = parse_integer<Index>(value, key, line);
  else if (key == "replicates") c.replicates = parse_integer<int>(value, key, line);
  else if (key == "seed") c.seed = parse_integer<std::uint64_t>(value, key, line);
  else if (key == "correlation_base") c.correlation_base = real();
  else if (key == "folds") c.folds = parse_integer<int>(value, key, line);
  else if (key == "grid_points") c.grid_points = parse_integer<std::size_t>(value, key, line);
  else if (key == "v") {
    // comma- or space-separated
    c.v.clear();
    std::string list(value);
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream tokens(list);
    for (std::string f; tokens >> f;) c.v.push_back(parse_number(f, line, 1));
  } else if (key == "threshold_mode") {
    if (value == "pooled") c.threshold_mode = ThresholdMode::kPooled;
    else if (value == "externally_normalized") c.threshold_mode = ThresholdMode::kExternallyNormalized;
    else throw InputError("line " + std::to_string(line) + ": unknown threshold_mode '" + std::string(value) + "'");
  } else {
    throw InputError("line " + std::to_string(line) + ": unknown config key '" + key + "'");
  }
}

}  // namespace detail

inline std::vector<sim::SimConfig> read_sim_configs(std::istream& in) {
  std::vector<sim::SimConfig> out;
  sim::SimConfig cur;
  bool touched = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s == "[run]") {
      if (touched) out.push_back(cur);
      cur = {};
      touched = false;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw InputError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(s.substr(0, eq)));
    detail::assign(cur, key, detail::trim(s.substr(eq + 1)), line_no);
    touched = true;
  }
  if (touched || out.empty()) out.push_back(cur);
  for (const auto& c : out) c.validate();
  return out;
}

inline std::vector<sim::SimConfig> read_sim_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_sim_configs(in);
}

}  // namespace caselasso::io
