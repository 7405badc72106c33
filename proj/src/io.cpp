#include "mdyn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace mdyn::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json graph_to_json(const Graph& g) {
  json j;
  j["n"] = g.vertex_count();
  j["adj"] = g.adjacency();
  json frozen = json::object();
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    if (g.frozen()[x]) frozen[std::to_string(x)] = *g.frozen()[x];
  }
  j["frozen"] = frozen;
  if (g.has_labels()) {
    json labels = json::array();
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      auto l = g.label(static_cast<Vertex>(x));
      labels.push_back(std::vector<int>(l.begin(), l.end()));
    }
    j["labels"] = labels;
  }
  if (!g.name().empty()) j["name"] = g.name();
  return j;
}

Graph graph_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto adj = j.at("adj").get<std::vector<std::vector<Vertex>>>();
    if (adj.size() != n) throw std::invalid_argument("graph json: adjacency length differs from n");
    std::vector<std::optional<double>> frozen(n);
    if (j.contains("frozen")) {
      for (const auto& [key, value] : j.at("frozen").items()) {
        const auto id = std::stoul(key);
        if (id >= n) throw std::invalid_argument("graph json: frozen id out of range");
        frozen[id] = value.get<double>();
      }
    }
    std::vector<std::vector<int>> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::vector<int>>>();
    Graph g(std::move(adj), std::move(labels), std::move(frozen));
    if (j.contains("name")) g = with_name(std::move(g), j.at("name").get<std::string>());
    return g;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("graph json: ") + e.what());
  }
}

json event_log_to_json(const EventLog& log) {
  json events = json::array();
  for (const auto& e : log.events) events.push_back(json::array({e.time, e.vertex, e.coin}));
  return json{{"seed", log.seed}, {"horizon", log.horizon}, {"n", log.vertex_count}, {"events", events}};
}

EventLog event_log_from_json(const json& j) {
  try {
    EventLog log;
    log.seed = j.at("seed").get<std::uint64_t>();
    log.horizon = j.at("horizon").get<double>();
    log.vertex_count = j.at("n").get<std::size_t>();
    double previous = -INFINITY;
    for (const auto& e : j.at("events")) {
      Event ev{e.at(0).get<double>(), e.at(1).get<Vertex>(), e.at(2).get<std::uint8_t>()};
      if (ev.vertex >= log.vertex_count) throw std::invalid_argument("event log json: vertex out of range");
      if (ev.time < previous || ev.time > log.horizon) throw std::invalid_argument("event log json: events out of order");
      if (ev.coin > 1) throw std::invalid_argument("event log json: coin must be 0 or 1");
      previous = ev.time;
      log.events.push_back(ev);
    }
    return log;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("event log json: ") + e.what());
  }
}

void write_flips_csv(std::ostream& out, const Trajectory& traj) {
  out << "time,vertex,old,new\n";
  for (const Flip& f : traj.flips()) {
    out << format_double(f.time) << ',' << f.vertex << ',' << format_double(f.old_value) << ','
        << format_double(f.new_value) << '\n';
  }
}

void write_config_csv(std::ostream& out, const OpinionConfig& c) {
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    if (i > 0) out << ',';
    out << format_double(c.values[i]);
  }
  out << '\n';
}

std::string heatmap_pgm(const Graph& g, const OpinionConfig& c) {
  if (g.torus_dim() != 2) throw std::invalid_argument("heatmap: graph is not a 2-d lattice");
  if (c.size() != g.vertex_count()) throw std::invalid_argument("heatmap: configuration size does not match graph");
  const int side = g.torus_side();
  std::string out = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  out.reserve(out.size() + c.size());
  // Torus ids are row-major in (first, second) coordinates.
  for (double v : c.values) {
    const long level = std::lround(255.0 * std::clamp(v, 0.0, 1.0));
    out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
  }
  return out;
}

void emit_heatmap(const Graph& g, const OpinionConfig& c, const std::filesystem::path& path) {
  const std::string bytes = heatmap_pgm(g, c);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("heatmap: cannot open " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("heatmap: write failed for " + path.string());
}

}  // namespace mdyn::io
