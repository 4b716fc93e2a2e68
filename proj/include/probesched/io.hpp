#pragma once

// Text formats for graphs, generating processes, schedules and samples.
//
//   edge list   "u v" per line, '#' comments (SNAP layout). A SNAP header
//               "# Nodes: N ..." raises n to at least N.
//   process     "<weight> <id> <id> ..." per line
//   schedule    "<id> <prob>" per line, ids ascending from 0
//   sample      "<t>: <id> <id> | <id> ..." per step, '|' separates sets,
//               an empty step is "<t>:"; t increases by one per line
//
// Floats are written with 17 significant digits and parsed without locale.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "probesched/model.hpp"

namespace probesched {

struct EdgeListOptions {
  bool one_based = false;   // subtract one from every id
  bool undirected = false;  // add the reverse of every edge
};

Graph load_graph(std::string_view text, const EdgeListOptions& options = {});
std::string format_edge_list(const Graph& graph);

// n defaults to one more than the largest member id.
GeneratingProcess parse_process(std::string_view text, std::optional<std::size_t> n = std::nullopt);
std::string format_process(const GeneratingProcess& process);

Schedule parse_schedule(std::string_view text);
std::string format_schedule(const Schedule& schedule);

Sample parse_sample(std::string_view text);
std::string format_sample(const Sample& sample, std::size_t first_step = 0);
// Largest member id in the sample plus one; 0 if no set occurs.
std::size_t sample_node_bound(const Sample& sample);

std::string format_double(double x);
double parse_double(std::string_view token, std::size_t line);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace probesched
