#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "erasure3d/errors.hpp"
#include "erasure3d/harness.hpp"

namespace erasure3d {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return std::string(s);
}

/// Drops a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quote) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#' || ch == ';') {
      return line.substr(0, i);
    }
  }
  return line;
}

bool parse_bool(std::string_view text) {
  const std::string v = unquote(text);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

int parse_int(std::string_view text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError("expected an integer");
  return static_cast<int>(v);
}

}  // namespace

double parse_number(std::string_view text) {
  const std::string s = unquote(text);
  const auto caret = s.find('^');
  auto parse_plain = [](std::string_view t) {
    t = trim(t);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
      throw ConfigError("not a number: '" + std::string(t) + "'");
    return v;
  };
  if (caret != std::string::npos)
    return std::pow(parse_plain(std::string_view(s).substr(0, caret)),
                    parse_plain(std::string_view(s).substr(caret + 1)));
  return parse_plain(s);
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::string s = unquote(text);
  std::string_view v = trim(s);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("unterminated list");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
    if (item.empty()) throw ConfigError("empty entry in size list");
    const double x = parse_number(item);
    if (!(x >= 1.0) || x != std::floor(x) || x > 1e15)
      throw ConfigError("size must be a positive integer: '" + std::string(item) + "'");
    out.push_back(static_cast<std::size_t>(x));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ConfigTable parse_config_text(std::string_view text) {
  ConfigTable table;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside of a section");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    auto& sec = table[section];
    if (sec.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    sec[key] = std::string(trim(line.substr(eq + 1)));
  }
  return table;
}

ConfigTable parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_config(ExperimentSpec& spec, const ConfigTable& table) {
  for (const auto& [section, entries] : table) {
    for (const auto& [key, value] : entries) {
      auto unknown = [&] { throw ConfigError("unknown key [" + section + "] " + key); };
      if (section == "network") {
        if (key == "lambda") spec.network.lambda = parse_number(value);
        else if (key == "mu") spec.network.mu = parse_number(value);
        else if (key == "nu") spec.network.nu = parse_number(value);
        else if (key == "density") spec.network.mode = parse_density_mode(unquote(value));
        else if (key == "allow_flat") spec.network.allow_flat = parse_bool(value);
        else unknown();
      } else if (section == "model") {
        if (key == "family") spec.family = parse_decay_family(unquote(value));
        else if (key == "gamma") spec.gamma = parse_number(value);
        else if (key == "alpha") spec.alpha = parse_number(value);
        else unknown();
      } else if (section == "percolation") {
        if (key == "c") spec.percolation.c = parse_number(value);
        else if (key == "kappa") spec.percolation.kappa = parse_number(value);
        else if (key == "delta") spec.percolation.delta = parse_number(value);
        else unknown();
      } else if (section == "routing") {
        if (key == "w") spec.routing.w = parse_number(value);
        else if (key == "borrow_adjacent") spec.routing.borrow_adjacent = parse_bool(value);
        else if (key == "packets") spec.routing.packets_per_source = parse_int(value);
        else if (key == "round_budget") {
          const double v = parse_number(value);
          if (v < 0.0) throw ConfigError("round_budget must be >= 0");
          spec.routing.round_budget = static_cast<std::uint64_t>(v);
        } else unknown();
      } else if (section == "sweep") {
        if (key == "n") spec.n_list = parse_size_list(value);
        else if (key == "seeds") spec.seeds_per_n = parse_int(value);
        else if (key == "seed") {
          const double v = parse_number(value);
          if (v < 0.0 || v != std::floor(v)) throw ConfigError("seed must be a nonnegative integer");
          spec.network.seed = static_cast<std::uint64_t>(v);
        } else if (key == "mode") spec.mode = parse_sweep_mode(unquote(value));
        else if (key == "out") spec.out = unquote(value);
        else if (key == "trace") spec.trace = unquote(value);
        else if (key == "jobs") spec.jobs = parse_int(value);
        else if (key == "with_bounds") spec.with_bounds = parse_bool(value);
        else unknown();
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
}

}  // namespace erasure3d
