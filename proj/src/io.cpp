#include "probesched/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "probesched/error.hpp"

namespace probesched {

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

// Non-empty, non-comment lines with surrounding whitespace removed.
std::vector<Line> content_lines(std::string_view text, std::vector<Line>* comments = nullptr) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (line.front() == '#') {
      if (comments) comments->push_back({number, line});
      continue;
    }
    lines.push_back({number, line});
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (true) {
    pos = s.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) break;
    const std::size_t end = s.find_first_of(" \t\r", pos);
    tokens.push_back(s.substr(pos, end - pos));
    if (end == std::string_view::npos) break;
    pos = end;
  }
  return tokens;
}

std::uint64_t parse_uint(std::string_view token, std::size_t line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(token) + "'");
  }
  return value;
}

NodeId parse_node(std::string_view token, std::size_t line) {
  const std::uint64_t v = parse_uint(token, line);
  if (v > std::numeric_limits<NodeId>::max() - 1) throw ParseError(line, "node id too large");
  return static_cast<NodeId>(v);
}

std::vector<NodeId> parse_members(std::string_view s, std::size_t line) {
  std::vector<NodeId> members;
  for (std::string_view tok : split_ws(s)) members.push_back(parse_node(tok, line));
  return members;
}

void append_members(std::string& out, const NodeSet& set) {
  bool first = true;
  for (NodeId v : set.members()) {
    if (!first) out += ' ';
    out += std::to_string(v);
    first = false;
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

Graph load_graph(std::string_view text, const EdgeListOptions& options) {
  std::vector<Line> comments;
  const std::vector<Line> lines = content_lines(text, &comments);
  if (lines.empty()) throw ParseError(0, "edge list contains no edges");

  std::size_t declared_nodes = 0;
  for (const Line& c : comments) {
    const auto tokens = split_ws(c.text.substr(1));
    if (tokens.size() >= 2 && tokens[0] == "Nodes:") {
      declared_nodes = static_cast<std::size_t>(parse_uint(tokens[1], c.number));
    }
  }

  std::vector<Edge> edges;
  edges.reserve(lines.size() * (options.undirected ? 2 : 1));
  NodeId max_id = 0;
  for (const Line& line : lines) {
    const auto tokens = split_ws(line.text);
    if (tokens.size() != 2) throw ParseError(line.number, "expected 'u v'");
    NodeId u = parse_node(tokens[0], line.number);
    NodeId v = parse_node(tokens[1], line.number);
    if (options.one_based) {
      if (u == 0 || v == 0) throw ParseError(line.number, "id 0 in a one-based edge list");
      --u;
      --v;
    }
    max_id = std::max({max_id, u, v});
    edges.push_back({u, v});
    if (options.undirected) edges.push_back({v, u});
  }
  const std::size_t n = std::max<std::size_t>(declared_nodes, std::size_t{max_id} + 1);
  return Graph(n, std::move(edges));
}

std::string format_edge_list(const Graph& graph) {
  std::string out = "# Nodes: " + std::to_string(graph.n()) + " Edges: " + std::to_string(graph.edge_count()) + "\n";
  for (const Edge& e : graph.edges()) {
    out += std::to_string(e.source);
    out += ' ';
    out += std::to_string(e.target);
    out += '\n';
  }
  return out;
}

GeneratingProcess parse_process(std::string_view text, std::optional<std::size_t> n) {
  std::vector<WeightedSet> sets;
  std::size_t bound = 0;
  for (const Line& line : content_lines(text)) {
    const std::size_t space = line.text.find_first_of(" \t");
    if (space == std::string_view::npos) throw ParseError(line.number, "expected '<weight> <id> ...'");
    const double weight = parse_double(line.text.substr(0, space), line.number);
    if (!(weight >= 0.0 && weight <= 1.0)) throw ParseError(line.number, "weight outside [0, 1]");
    std::vector<NodeId> members = parse_members(line.text.substr(space), line.number);
    if (members.empty()) throw ParseError(line.number, "set has no members");
    NodeSet set(std::move(members));
    bound = std::max<std::size_t>(bound, std::size_t{set.max_id()} + 1);
    sets.push_back({std::move(set), weight});
  }
  if (sets.empty()) throw ParseError(0, "process file contains no sets");
  const std::size_t nodes = n.value_or(bound);
  if (bound > nodes) throw ParseError(0, "set member exceeds node count " + std::to_string(nodes));
  return GeneratingProcess(nodes, std::move(sets));
}

std::string format_process(const GeneratingProcess& process) {
  std::string out;
  for (const WeightedSet& ws : process.sets()) {
    out += format_double(ws.weight);
    out += ' ';
    append_members(out, ws.set);
    out += '\n';
  }
  return out;
}

Schedule parse_schedule(std::string_view text) {
  std::vector<double> probs;
  for (const Line& line : content_lines(text)) {
    const auto tokens = split_ws(line.text);
    if (tokens.size() != 2) throw ParseError(line.number, "expected '<id> <prob>'");
    if (parse_uint(tokens[0], line.number) != probs.size()) {
      throw ParseError(line.number, "ids must ascend from 0 without gaps");
    }
    probs.push_back(parse_double(tokens[1], line.number));
  }
  if (probs.empty()) throw ParseError(0, "schedule file is empty");
  return validate_schedule(probs);
}

std::string format_schedule(const Schedule& schedule) {
  std::string out;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    out += std::to_string(i);
    out += ' ';
    out += format_double(schedule[i]);
    out += '\n';
  }
  return out;
}

Sample parse_sample(std::string_view text) {
  Sample sample;
  std::optional<std::uint64_t> previous;
  for (const Line& line : content_lines(text)) {
    const std::size_t colon = line.text.find(':');
    if (colon == std::string_view::npos) throw ParseError(line.number, "expected '<t>: ...'");
    const std::uint64_t t = parse_uint(line.text.substr(0, colon), line.number);
    if (previous && t != *previous + 1) throw ParseError(line.number, "steps must be consecutive");
    previous = t;

    std::vector<NodeSet>& step = sample.steps.emplace_back();
    std::string_view rest = line.text.substr(colon + 1);
    if (rest.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    while (true) {
      const std::size_t bar = rest.find('|');
      std::vector<NodeId> members = parse_members(rest.substr(0, bar), line.number);
      if (members.empty()) throw ParseError(line.number, "empty set between separators");
      step.emplace_back(std::move(members));
      if (bar == std::string_view::npos) break;
      rest = rest.substr(bar + 1);
    }
  }
  if (sample.steps.empty()) throw ParseError(0, "sample file contains no steps");
  return sample;
}

std::string format_sample(const Sample& sample, std::size_t first_step) {
  std::string out;
  for (std::size_t t = 0; t < sample.steps.size(); ++t) {
    out += std::to_string(first_step + t);
    out += ':';
    bool first = true;
    for (const NodeSet& set : sample.steps[t]) {
      out += first ? " " : " | ";
      append_members(out, set);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::size_t sample_node_bound(const Sample& sample) {
  std::size_t bound = 0;
  for (const auto& step : sample.steps)
    for (const NodeSet& set : step) bound = std::max<std::size_t>(bound, std::size_t{set.max_id()} + 1);
  return bound;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace probesched
