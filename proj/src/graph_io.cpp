#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "orcurv/errors.hpp"
#include "orcurv/graph.hpp"

namespace orc {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(tok) + "'", line);
  }
  return value;
}

}  // namespace

void write_edge_list(const GeoGraph& graph, std::ostream& out) {
  const auto& m = graph.meta();
  out << "# surface=" << (m.surface ? surface_tag(m.surface->kind) : std::string_view("none"))
      << " n=" << m.sampled << " epsilon=" << fmt17(m.epsilon)
      << " scheme=" << scheme_tag(m.scheme) << " seed=" << m.seed << '\n';
  for (const auto& e : graph.edges()) {
    out << e.u << ' ' << e.v << ' ' << fmt17(e.weight) << '\n';
  }
  out << "# nodes\n";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    out << i;
    if (graph.has_coordinates()) {
      const auto p = graph.nodes()[i];
      out << ' ' << fmt17(p.c1) << ' ' << fmt17(p.c2);
    }
    out << '\n';
  }
}

void write_edge_list(const GeoGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_edge_list(graph, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

GeoGraph read_edge_list(std::istream& in) {
  GraphMeta meta;
  std::vector<Edge> edges;
  std::vector<SurfacePoint> coords;
  std::vector<bool> seen;
  bool all_coords = true;
  bool in_nodes = false;
  std::size_t node_lines = 0;
  NodeId max_id = -1;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "#" || toks[0].front() == '#') {
      std::vector<std::string_view> rest(toks.begin() + (toks[0] == "#" ? 1 : 0), toks.end());
      if (!rest.empty() && rest[0].front() == '#') rest[0].remove_prefix(1);
      if (!rest.empty() && rest[0] == "nodes") {
        in_nodes = true;
        continue;
      }
      for (auto kv : rest) {
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        try {
          if (key == "surface") {
            if (val == "none") meta.surface.reset();
            else meta.surface = Surface{parse_surface_kind(val)};
          } else if (key == "n") {
            meta.sampled = parse_number<std::size_t>(val, lineno, "n");
          } else if (key == "epsilon") {
            meta.epsilon = parse_number<double>(val, lineno, "epsilon");
          } else if (key == "scheme") {
            meta.scheme = parse_weight_scheme(val);
          } else if (key == "seed") {
            meta.seed = parse_number<std::uint64_t>(val, lineno, "seed");
          }
        } catch (const DomainError& e) {
          throw ParseError(e.what(), lineno);
        }
      }
      continue;
    }

    if (in_nodes) {
      if (toks.size() != 1 && toks.size() != 3) {
        throw ParseError("node line needs 'i' or 'i c1 c2'", lineno);
      }
      const auto id = parse_number<NodeId>(toks[0], lineno, "node index");
      if (id < 0) throw ParseError("negative node index", lineno);
      if (static_cast<std::size_t>(id) >= coords.size()) {
        coords.resize(id + 1);
        seen.resize(id + 1, false);
      }
      if (seen[id]) throw ParseError("duplicate node " + std::to_string(id), lineno);
      seen[id] = true;
      ++node_lines;
      if (toks.size() == 3) {
        coords[id] = {parse_number<double>(toks[1], lineno, "coordinate"),
                      parse_number<double>(toks[2], lineno, "coordinate")};
      } else {
        all_coords = false;
      }
      max_id = std::max(max_id, id);
      continue;
    }

    if (toks.size() != 2 && toks.size() != 3) {
      throw ParseError("edge line needs 'u v' or 'u v w'", lineno);
    }
    Edge e;
    e.u = parse_number<NodeId>(toks[0], lineno, "node index");
    e.v = parse_number<NodeId>(toks[1], lineno, "node index");
    e.weight = toks.size() == 3 ? parse_number<double>(toks[2], lineno, "weight") : 1.0;
    if (e.u < 0 || e.v < 0) throw ParseError("negative node index", lineno);
    if (e.u == e.v) throw ParseError("self-loop", lineno);
    if (!(e.weight >= 0.0)) throw ParseError("negative weight", lineno);
    max_id = std::max({max_id, e.u, e.v});
    edges.push_back(e);
  }

  const std::size_t n = static_cast<std::size_t>(max_id + 1);
  if (node_lines > 0 && node_lines != n) {
    throw ParseError("node block lists " + std::to_string(node_lines) + " nodes, edges need " +
                         std::to_string(n),
                     0);
  }
  if (node_lines == 0 || !all_coords) coords.clear();
  try {
    return GeoGraph::from_edges(n, edges, std::move(meta), std::move(coords));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

GeoGraph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_edge_list(in);
}

}  // namespace orc
