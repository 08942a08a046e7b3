// Sweep config reader. Grammar (one document, one sweep):
//
//   document := line*
//   line     := ws ( "[sweep]" | key ws "=" ws value )? ws comment?
//   value    := scalar | "[" scalar ("," scalar)* ","? "]"
//   scalar   := number | bool | '"' chars '"' | bare word
//   comment  := "#" to end of line (outside quotes)

#include <charconv>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "orcurv/errors.hpp"
#include "orcurv/harness.hpp"

namespace orc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

struct Value {
  std::vector<std::string> items;
  bool is_list = false;
};

std::string unquote(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.empty()) throw ParseError("empty value", line);
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ParseError("unterminated string", line);
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.find('"') != std::string_view::npos) throw ParseError("stray quote in value", line);
  return std::string(s);
}

Value parse_value(std::string_view s, std::size_t line) {
  s = trim(s);
  Value v;
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ParseError("unterminated list", line);
    v.is_list = true;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      v.items.push_back(unquote(body.substr(0, comma), line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    if (v.items.empty()) throw ParseError("empty list", line);
  } else {
    v.items.push_back(unquote(s, line));
  }
  return v;
}

double to_double(const std::string& s, std::size_t line) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError("expected a number, got '" + s + "'", line);
  return x;
}

std::uint64_t to_uint(const std::string& s, std::size_t line) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("expected a non-negative integer, got '" + s + "'", line);
  }
  return x;
}

bool to_bool(const std::string& s, std::size_t line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError("expected true or false, got '" + s + "'", line);
}

const std::string& scalar(const Value& v, std::string_view key, std::size_t line) {
  if (v.is_list) throw ParseError(std::string(key) + " takes a single value", line);
  return v.items.front();
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(strip_comment(raw));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text != "[sweep]") throw ParseError("unknown section " + std::string(text), line);
      if (header_seen || !seen.empty()) throw ParseError("[sweep] must open the document", line);
      header_seen = true;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line);
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) throw ParseError("missing key", line);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line);
    const Value v = parse_value(text.substr(eq + 1), line);

    try {
      if (key == "surfaces") {
        cfg.surfaces.clear();
        for (const auto& s : v.items) cfg.surfaces.push_back(parse_surface_kind(s));
      } else if (key == "n_list") {
        cfg.n_list.clear();
        for (const auto& s : v.items) cfg.n_list.push_back(to_uint(s, line));
      } else if (key == "alpha") {
        cfg.alpha = to_double(scalar(v, key, line), line);
      } else if (key == "beta") {
        cfg.beta = to_double(scalar(v, key, line), line);
      } else if (key == "c_eps") {
        cfg.c_eps = to_double(scalar(v, key, line), line);
      } else if (key == "c_delta") {
        cfg.c_delta = to_double(scalar(v, key, line), line);
      } else if (key == "scheme") {
        cfg.scheme = parse_weight_scheme(scalar(v, key, line));
      } else if (key == "repetitions") {
        cfg.repetitions = to_uint(scalar(v, key, line), line);
      } else if (key == "budget") {
        cfg.budget = to_uint(scalar(v, key, line), line);
      } else if (key == "base_seed") {
        cfg.base_seed = to_uint(scalar(v, key, line), line);
      } else if (key == "max_retries") {
        cfg.max_retries = to_uint(scalar(v, key, line), line);
      } else if (key == "mode") {
        const auto& m = scalar(v, key, line);
        if (m == "fixed") cfg.mode = CountMode::FixedCount;
        else if (m == "poisson") cfg.mode = CountMode::PoissonCount;
        else throw ParseError("mode must be fixed or poisson", line);
      } else if (key == "method") {
        const auto& m = scalar(v, key, line);
        if (m == "astar") cfg.method = SearchMethod::AStar;
        else if (m == "dijkstra") cfg.method = SearchMethod::Dijkstra;
        else throw ParseError("method must be astar or dijkstra", line);
      } else if (key == "threads") {
        cfg.threads = static_cast<int>(to_uint(scalar(v, key, line), line));
      } else if (key == "timing") {
        cfg.record_timing = to_bool(scalar(v, key, line), line);
      } else if (key == "output") {
        cfg.output = scalar(v, key, line);
      } else {
        throw ParseError("unknown key '" + key + "'", line);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line);
    }
  }
  if (in.bad()) throw ParseError("read failure", 0);
  if (cfg.n_list.empty()) throw ParseError("n_list is required", 0);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace orc
