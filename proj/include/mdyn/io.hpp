#ifndef MDYN_IO_HPP
#define MDYN_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdyn/engine.hpp"
#include "mdyn/graph.hpp"
#include "mdyn/randomness.hpp"

namespace mdyn::io {

/// {"n": N, "adj": [[...], ...], "frozen": {"id": value, ...}} plus
/// "labels" when present.
nlohmann::json graph_to_json(const Graph& g);
/// Inverse of graph_to_json; labels are optional. Throws
/// std::invalid_argument on malformed input.
Graph graph_from_json(const nlohmann::json& j);

/// {"seed", "horizon", "n", "events": [[time, vertex, coin], ...]}
nlohmann::json event_log_to_json(const EventLog& log);
EventLog event_log_from_json(const nlohmann::json& j);

/// CSV with header "time,vertex,old,new"; values printed round-trip exact.
void write_flips_csv(std::ostream& out, const Trajectory& traj);
/// One line of comma-separated opinions in vertex order.
void write_config_csv(std::ostream& out, const OpinionConfig& c);

/// Binary PGM (P5) of a 2-d lattice configuration: row = first coordinate,
/// column = second, intensity round(255 * opinion). Throws
/// std::invalid_argument for graphs that are not 2-d tori.
std::string heatmap_pgm(const Graph& g, const OpinionConfig& c);
void emit_heatmap(const Graph& g, const OpinionConfig& c, const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace mdyn::io

#endif  // MDYN_IO_HPP
