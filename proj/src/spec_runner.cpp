#include "mdyn/spec_runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdyn/analytic.hpp"
#include "mdyn/engine.hpp"
#include "mdyn/experiments.hpp"
#include "mdyn/io.hpp"

namespace mdyn {

using nlohmann::json;

namespace {

json linspace(double lo, double hi, int n) {
  json out = json::array();
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

json defaults_for(const std::string& kind) {
  json d = {{"kind", kind}, {"seed", 1}, {"params", json::object()}};
  if (kind == "marginal") {
    d["graph"] = {{"type", "complete"}, {"n", 5}};
    d["rule"] = "median";
    d["replicas"] = 10000;
    d["params"] = {{"vertex", 0}, {"times", {0.0, 0.5, 1.0, 2.0}}, {"thresholds", {0.1, 0.25, 0.4, 0.5}}};
  } else if (kind == "coupling") {
    d["graph"] = {{"type", "complete"}, {"n", 3}};
    d["horizon"] = 5.0;
    d["replicas"] = 100;
    d["params"] = {{"p_grid", linspace(0.0, 1.0, 21)}};
  } else if (kind == "domination") {
    d["graph"] = {{"type", "torus"}, {"side", 10}, {"dim", 2}};
    d["horizon"] = 5.0;
    d["replicas"] = 100;
    d["params"] = {{"alpha", 0.25}, {"beta", 0.5}};
  } else if (kind == "monotonicity") {
    d["graph"] = {{"type", "complete"}, {"n", 5}};
    d["rule"] = "median";
    d["replicas"] = 10000;
    d["params"] = {{"vertex", 0}, {"threshold", 0.3}, {"times", {0.0, 0.5, 1.0, 2.0, 4.0}}};
  } else if (kind == "unimodality") {
    d["graph"] = {{"type", "complete"}, {"n", 6}};
    d["rule"] = "median";
    d["replicas"] = 10000;
    d["params"] = {{"vertex", 0}, {"t", 2.0}, {"p_grid", linspace(0.0, 0.5, 6)}};
  } else if (kind == "fixation") {
    d["graph"] = {{"type", "torus"}, {"side", 30}, {"dim", 2}};
    d["rule"] = "median";
    d["horizon"] = 50.0;
    d["replicas"] = 20;
    d["params"] = {{"window", 10.0}, {"bins", 20}, {"p", 0.5}};
  } else if (kind == "limit_histogram") {
    d["graph"] = {{"type", "torus"}, {"side", 50}, {"dim", 2}};
    d["horizon"] = 200.0;
    d["replicas"] = 1000;
    d["params"] = {{"vertex", 0},
                   {"window", 20.0},
                   {"bins", 20},
                   {"windows", {{0.0, 1.0}, {0.4, 0.6}, {0.0, 0.1}, {0.45, 0.55}}},
                   {"tail_alphas", {0.05, 0.1, 0.2, 0.3}}};
  } else if (kind == "energy") {
    d["graph"] = {{"type", "torus"}, {"side", 20}, {"dim", 2}};
    d["rule"] = "median_coins";
    d["horizon"] = 100.0;
    d["replicas"] = 100;
    d["params"] = {{"vertex", 0},
                   {"eps", {0.1, 0.2, 0.5}},
                   {"observe_times", {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}}};
  } else if (kind == "sequential_bipartite") {
    d["replicas"] = 100000;
    d["params"] = {{"p", 0.4}, {"m", 7}};
  } else if (kind == "analytic_table") {
    d["params"] = {{"formula", "p_z"}, {"times", {0.0, 0.5, 1.0, 2.0}}, {"xs", linspace(0.0, 1.0, 11)}};
  } else if (kind == "snapshot") {
    d["graph"] = {{"type", "torus"}, {"side", 100}, {"dim", 2}};
    d["rule"] = "median_coins";
    d["params"] = {{"times", {0.0, 1000.0, 5000.0, 10000.0}}};
  }
  return d;
}

/// Collects validation problems instead of failing on the first one.
class Checker {
 public:
  explicit Checker(const json& root) : root_(root) {}

  const json* find(const std::string& path) const {
    const json* node = &root_;
    std::size_t start = 0;
    while (start <= path.size()) {
      const auto dot = path.find('.', start);
      const auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node->is_object() || !node->contains(key)) return nullptr;
      node = &(*node)[key];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return node;
  }

  double number(const std::string& path, double lo, double hi, bool required = true) {
    const json* v = find(path);
    if (!v) {
      if (required) fail(path + ": missing");
      return NAN;
    }
    if (!v->is_number()) {
      fail(path + ": must be a number");
      return NAN;
    }
    const double x = v->get<double>();
    if (!(x >= lo && x <= hi)) fail(path + ": " + io::format_double(x) + " outside [" + io::format_double(lo) + ", " + io::format_double(hi) + "]");
    return x;
  }

  long integer(const std::string& path, long lo, long hi) {
    const json* v = find(path);
    if (!v) {
      fail(path + ": missing");
      return lo;
    }
    if (!v->is_number_integer()) {
      fail(path + ": must be an integer");
      return lo;
    }
    const auto x = v->get<long>();
    if (x < lo || x > hi) fail(path + ": " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::vector<double> numbers(const std::string& path, double lo, double hi, std::size_t min_size = 1) {
    const json* v = find(path);
    std::vector<double> out;
    if (!v || !v->is_array()) {
      fail(path + ": must be an array of numbers");
      return out;
    }
    for (const auto& e : *v) {
      if (!e.is_number()) {
        fail(path + ": must be an array of numbers");
        return {};
      }
      const double x = e.get<double>();
      if (!(x >= lo && x <= hi)) fail(path + ": entry " + io::format_double(x) + " outside [" + io::format_double(lo) + ", " + io::format_double(hi) + "]");
      out.push_back(x);
    }
    if (out.size() < min_size) fail(path + ": needs at least " + std::to_string(min_size) + " entries");
    return out;
  }

  std::string string(const std::string& path) {
    const json* v = find(path);
    if (!v || !v->is_string()) {
      fail(path + ": must be a string");
      return {};
    }
    return v->get<std::string>();
  }

  void fail(std::string msg) { problems_.push_back(std::move(msg)); }
  [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

 private:
  const json& root_;
  std::vector<std::string> problems_;
};

constexpr double kHuge = 1e12;

void validate_graph(Checker& c) {
  const json* g = c.find("graph");
  if (!g) {
    c.fail("graph: missing");
    return;
  }
  try {
    const Graph graph = build_graph(*g);
    if (const json* v = c.find("params.vertex"); v && v->is_number_integer()) {
      if (v->get<long>() < 0 || static_cast<std::size_t>(v->get<long>()) >= graph.vertex_count()) {
        c.fail("params.vertex: " + v->dump() + " is not a vertex of a graph with " +
               std::to_string(graph.vertex_count()) + " vertices");
      }
    }
  } catch (const std::exception& e) {
    c.fail(std::string("graph: ") + e.what());
  }
}

void validate_kind(Checker& c, const std::string& kind) {
  auto need_graph = [&] { validate_graph(c); };
  auto need_rule = [&] {
    const auto r = c.string("rule");
    if (!r.empty() && !parse_rule(r)) c.fail("rule: unknown rule '" + r + "'");
  };
  if (kind != "sequential_bipartite" && kind != "analytic_table") need_graph();

  if (kind == "marginal") {
    need_rule();
    c.integer("replicas", 1, 100000000);
    c.integer("params.vertex", 0, 1L << 31);
    c.numbers("params.times", 0.0, kHuge);
    c.numbers("params.thresholds", 0.0, 1.0);
  } else if (kind == "coupling") {
    c.number("horizon", 0.0, kHuge);
    c.integer("replicas", 1, 100000000);
    c.numbers("params.p_grid", 0.0, 1.0);
  } else if (kind == "domination") {
    c.number("horizon", 0.0, kHuge);
    c.integer("replicas", 1, 100000000);
    const double a = c.number("params.alpha", 0.0, 0.5);
    const double b = c.number("params.beta", 0.0, 1.0);
    if (a == 0.5) c.fail("params.alpha: must be < 1/2");
    if (a + b > 1.0) c.fail("params.beta: alpha + beta must be <= 1");
  } else if (kind == "monotonicity") {
    need_rule();
    c.integer("replicas", 1, 100000000);
    c.integer("params.vertex", 0, 1L << 31);
    c.number("params.threshold", 0.0, 0.5);
    c.numbers("params.times", 0.0, kHuge);
  } else if (kind == "unimodality") {
    need_rule();
    c.integer("replicas", 1, 100000000);
    c.integer("params.vertex", 0, 1L << 31);
    c.number("params.t", 0.0, kHuge);
    c.numbers("params.p_grid", 0.0, 0.5, 3);
  } else if (kind == "fixation") {
    need_rule();
    const double h = c.number("horizon", 0.0, kHuge);
    c.integer("replicas", 1, 100000000);
    const double w = c.number("params.window", 0.0, kHuge);
    if (w > h) c.fail("params.window: must be <= horizon");
    c.integer("params.bins", 1, 1000000);
    c.number("params.p", 0.0, 1.0);
  } else if (kind == "limit_histogram") {
    const double h = c.number("horizon", 0.0, kHuge);
    c.integer("replicas", 1, 100000000);
    c.integer("params.vertex", 0, 1L << 31);
    const double w = c.number("params.window", 0.0, kHuge);
    if (w > h) c.fail("params.window: must be <= horizon");
    c.integer("params.bins", 1, 1000000);
    c.numbers("params.tail_alphas", 0.0, 1.0, 0);
    const json* ws = c.find("params.windows");
    if (!ws || !ws->is_array()) {
      c.fail("params.windows: must be an array of [alpha, beta] pairs");
    } else {
      for (const auto& p : *ws) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number() ||
            !(0.0 <= p[0].get<double>() && p[0].get<double>() < p[1].get<double>() && p[1].get<double>() <= 1.0)) {
          c.fail("params.windows: each entry must be [alpha, beta] with 0 <= alpha < beta <= 1");
          break;
        }
      }
    }
    if (const json* g = c.find("graph"); g && g->value("type", "") != "torus") c.fail("graph: limit_histogram needs a torus");
    if (const json* g = c.find("graph"); g && g->value("dim", 0) != 2) c.fail("graph: limit_histogram needs dim = 2");
  } else if (kind == "energy") {
    need_rule();
    if (c.find("rule") && c.find("rule")->is_string()) {
      const auto r = parse_rule(c.find("rule")->get<std::string>());
      if (r && is_binary(*r)) c.fail("rule: energy needs a real-valued rule");
    }
    const double h = c.number("horizon", 0.0, kHuge);
    c.integer("replicas", 1, 100000000);
    c.integer("params.vertex", 0, 1L << 31);
    for (double e : c.numbers("params.eps", 0.0, kHuge)) {
      if (e <= 0.0) c.fail("params.eps: entries must be > 0");
    }
    for (double t : c.numbers("params.observe_times", 0.0, kHuge, 0)) {
      if (t > h) c.fail("params.observe_times: entries must be <= horizon");
    }
  } else if (kind == "sequential_bipartite") {
    c.integer("replicas", 1, 100000000);
    c.number("params.p", 0.0, 1.0);
    const long m = c.integer("params.m", 1, 10001);
    if (m % 2 == 0) c.fail("params.m: must be odd");
  } else if (kind == "analytic_table") {
    const auto f = c.string("params.formula");
    c.numbers("params.times", 0.0, kHuge);
    c.numbers("params.xs", 0.0, 1.0);
    if (f == "mu_kn_odd") {
      c.integer("params.n", 0, 60);
    } else if (f == "mu_kn_even") {
      c.integer("params.n", 1, 60);
    } else if (f == "f_interval") {
      const long i = c.integer("params.i", 0, 1);
      const long jj = c.integer("params.j", 0, 1);
      const long k = c.integer("params.k", 1, 1000000);
      if ((i == jj) != (k % 2 == 1)) c.fail("params.k: must be odd iff i == j");
    } else if (f == "interval_prob") {
      const long i = c.integer("params.i", 0, 1);
      const long jj = c.integer("params.j", 0, 1);
      const long k = c.integer("params.k", 1, 1000000);
      if ((i == jj) != (k % 2 == 1)) c.fail("params.k: must be odd iff i == j");
    } else if (f == "bipartite_sequence") {
      const long m = c.integer("params.m", 1, 10001);
      if (m % 2 == 0) c.fail("params.m: must be odd");
    } else if (f != "p_z" && f != "lehner" && !f.empty()) {
      c.fail("params.formula: unknown formula '" + f + "'");
    }
  } else if (kind == "snapshot") {
    need_rule();
    c.numbers("params.times", 0.0, kHuge);
    if (const json* g = c.find("graph"); g && (g->value("type", "") != "torus" || g->value("dim", 0) != 2)) {
      c.fail("graph: snapshot needs a 2-d torus");
    }
  }
  c.integer("seed", 0, std::numeric_limits<long>::max());
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> as_doubles(const json& j) { return j.get<std::vector<double>>(); }

/// CSV writer that stamps the schema, seed and spec hash on the first line.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const ExperimentSpec& spec, const std::string& header)
      : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    out_ << "# " << kCsvSchema << " kind=" << spec.kind << " seed=" << spec.seed
         << " spec_hash=" << spec.hash() << '\n'
         << header << '\n';
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed for " + path_.string());
  }

 private:
  static std::string cell(double v) { return io::format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  template <class T>
  static std::string cell(const T& v) requires std::is_integral_v<T> { return std::to_string(v); }

  std::filesystem::path path_;
  std::ofstream out_;
};

std::optional<double> marginal_oracle(const json& graph, RuleKind rule, double t, double threshold) {
  const std::string type = graph.value("type", "");
  if (type == "complete" && rule == RuleKind::Median) {
    const int n = graph.value("n", 0);
    if (n % 2 == 1) return analytic::mu_kn_odd((n - 1) / 2, threshold, t);
    return analytic::mu_kn_even(n / 2, threshold, t);
  }
  if (type == "cycle" && rule == RuleKind::Majority) return analytic::p_z(threshold, t);
  return std::nullopt;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "marginal",        "coupling", "domination",           "monotonicity",   "unimodality",
      "fixation",        "limit_histogram", "energy",        "sequential_bipartite",
      "analytic_table",  "snapshot"};
  return kinds;
}

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid experiment spec:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

Graph build_graph(const json& desc) {
  if (!desc.is_object()) throw std::invalid_argument("graph description must be an object");
  const std::string type = desc.value("type", "");
  auto get_int = [&](const char* key) {
    if (!desc.contains(key) || !desc[key].is_number_integer()) {
      throw std::invalid_argument(std::string("graph.") + key + " must be an integer");
    }
    return desc[key].get<int>();
  };
  if (type == "complete") return build_complete(get_int("n"));
  if (type == "bipartite") return build_complete_bipartite(get_int("a"), get_int("b"));
  if (type == "torus") return build_torus(get_int("side"), get_int("dim"));
  if (type == "cycle") return build_cycle(get_int("n"));
  if (type == "path") {
    return build_path_with_frozen_boundary(get_int("k"), desc.value("left", 1.0), desc.value("right", 1.0));
  }
  if (type == "file") {
    std::ifstream in(desc.value("path", ""));
    if (!in) throw std::invalid_argument("cannot read graph file '" + desc.value("path", "") + "'");
    return io::graph_from_json(json::parse(in));
  }
  throw std::invalid_argument("unknown graph type '" + type + "'");
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError({"spec: must be a JSON object"});
  if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError({"kind: missing"});
  const auto kind = j["kind"].get<std::string>();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw ValidationError({"kind: unknown experiment kind '" + kind + "'"});
  }
  json merged = defaults_for(kind);
  merged.merge_patch(j);

  Checker c(merged);
  validate_kind(c, kind);
  if (!c.problems().empty()) throw ValidationError(c.problems());

  ExperimentSpec s;
  s.kind = kind;
  s.graph = merged.value("graph", json::object());
  s.rule = merged.value("rule", "");
  s.horizon = merged.value("horizon", 0.0);
  s.replicas = merged.value("replicas", std::size_t{0});
  s.seed = merged["seed"].get<std::uint64_t>();
  s.params = merged["params"];
  s.prefix = merged.contains("output") ? merged["output"].value("prefix", kind) : kind;
  return s;
}

json ExperimentSpec::to_json() const {
  json j = {{"kind", kind}, {"seed", seed}, {"params", params}, {"output", {{"prefix", prefix}}}};
  if (!graph.empty()) j["graph"] = graph;
  if (!rule.empty()) j["rule"] = rule;
  if (horizon > 0.0) j["horizon"] = horizon;
  if (replicas > 0) j["replicas"] = replicas;
  return j;
}

std::string ExperimentSpec::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
  return buf;
}

RunOutcome run_spec(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / (spec.prefix + ".csv");
  RunOutcome outcome;
  json results = json::object();
  const json& P = spec.params;
  const auto rule = parse_rule(spec.rule).value_or(RuleKind::Median);
  std::optional<Graph> graph;
  if (!spec.graph.empty()) graph = build_graph(spec.graph);

  if (spec.kind == "marginal") {
    CsvFile csv(csv_path, spec, "graph,rule,vertex,t,threshold,replicas,estimate,std_error,oracle,seed");
    const auto x = P["vertex"].get<Vertex>();
    const auto est = estimate_marginal_grid(*graph, rule, x, as_doubles(P["times"]), as_doubles(P["thresholds"]),
                                            spec.replicas, spec.seed);
    json rows = json::array();
    std::size_t outside = 0;
    for (const auto& e : est) {
      const auto oracle = marginal_oracle(spec.graph, rule, e.t, e.threshold);
      csv.row(e.graph, std::string(to_string(rule)), e.vertex, e.t, e.threshold, e.replicas, e.estimate,
              e.std_error, oracle ? io::format_double(*oracle) : std::string(), e.seed);
      if (oracle && std::fabs(e.estimate - *oracle) > 3.0 * e.std_error) ++outside;
      rows.push_back({{"t", e.t}, {"threshold", e.threshold}, {"estimate", e.estimate}, {"std_error", e.std_error}});
    }
    csv.close();
    results["estimates"] = rows;
    results["cells_outside_3se_of_oracle"] = outside;
  } else if (spec.kind == "coupling") {
    CsvFile csv(csv_path, spec, "replica,log_seed,events,pass,fail_p,fail_time,fail_vertex");
    const auto grid = as_doubles(P["p_grid"]);
    std::size_t failures = 0;
    for (std::size_t r = 0; r < spec.replicas; ++r) {
      const auto rs = replica_seed(spec.seed, r);
      const auto log = sample_event_log(*graph, spec.horizon, derive_seed(rs, 0, static_cast<std::uint64_t>(StreamTag::Clock)));
      const auto eta0 = init_uniform(*graph, derive_seed(rs, 0, static_cast<std::uint64_t>(StreamTag::Init)));
      const auto rep = check_coupling(*graph, log, eta0, grid);
      if (!rep.pass) ++failures;
      csv.row(r, log.seed, log.events.size(), rep.pass, rep.failure ? io::format_double(rep.failure->threshold) : "",
              rep.failure ? io::format_double(rep.failure->time) : "",
              rep.failure ? std::to_string(rep.failure->vertex) : "");
    }
    csv.close();
    results["replicas"] = spec.replicas;
    results["failures"] = failures;
    outcome.pass = failures == 0;
  } else if (spec.kind == "domination") {
    CsvFile csv(csv_path, spec, "replica,pass,checks,fail_time,fail_vertex");
    const double alpha = P["alpha"].get<double>();
    const double beta = P["beta"].get<double>();
    std::size_t failures = 0;
    for (std::size_t r = 0; r < spec.replicas; ++r) {
      const auto rs = replica_seed(spec.seed, r);
      const auto log = sample_event_log(*graph, spec.horizon, derive_seed(rs, 0, static_cast<std::uint64_t>(StreamTag::Clock)));
      const auto eta0 = init_uniform(*graph, derive_seed(rs, 0, static_cast<std::uint64_t>(StreamTag::Init)));
      const auto rep = check_domination(*graph, log, alpha, beta, eta0);
      if (!rep.pass) ++failures;
      csv.row(r, rep.pass, rep.checks, rep.failure ? io::format_double(rep.failure->time) : "",
              rep.failure ? std::to_string(rep.failure->vertex) : "");
    }
    csv.close();
    results["failures"] = failures;
    outcome.pass = failures == 0;
  } else if (spec.kind == "monotonicity" || spec.kind == "unimodality") {
    const bool mono = spec.kind == "monotonicity";
    const auto x = P["vertex"].get<Vertex>();
    const ScanResult scan =
        mono ? monotonicity_scan(*graph, rule, x, P["threshold"].get<double>(), as_doubles(P["times"]), spec.replicas, spec.seed)
             : unimodality_scan(*graph, rule, x, P["t"].get<double>(), as_doubles(P["p_grid"]), spec.replicas, spec.seed);
    CsvFile csv(csv_path, spec, "t,threshold,estimate,std_error,statistic,statistic_se");
    for (std::size_t i = 0; i < scan.estimates.size(); ++i) {
      const auto& e = scan.estimates[i];
      // Statistic i - 1 ends at cell i (differences) or is centred on it
      // (second differences).
      const bool has = i >= 1 && i - 1 < scan.statistic.size();
      csv.row(e.t, e.threshold, e.estimate, e.std_error, has ? io::format_double(scan.statistic[i - 1]) : "",
              has ? io::format_double(scan.statistic_se[i - 1]) : "");
    }
    csv.close();
    results["verdict"] = std::string(to_string(scan.verdict));
  } else if (spec.kind == "fixation") {
    const auto rep = fixation_run(*graph, rule, spec.horizon, P["window"].get<double>(), spec.replicas, spec.seed,
                                  P["p"].get<double>(), P["bins"].get<std::size_t>());
    CsvFile csv(csv_path, spec, "row,key,count");
    for (const auto& [flips, count] : rep.flip_count_distribution) csv.row("flip_count", flips, count);
    for (std::size_t b = 0; b < rep.last_flip_histogram.size(); ++b) {
      csv.row("last_flip_bin", b, rep.last_flip_histogram[b]);
    }
    csv.close();
    results["fixation_fraction"] = rep.fixation_fraction;
    results["max_flips"] = rep.max_flips;
    results["never_flipped"] = rep.never_flipped;
  } else if (spec.kind == "limit_histogram") {
    std::vector<std::pair<double, double>> windows;
    for (const auto& w : P["windows"]) windows.emplace_back(w[0].get<double>(), w[1].get<double>());
    const auto rep = limit_histogram(*graph, P["vertex"].get<Vertex>(), spec.replicas, spec.horizon,
                                     P["window"].get<double>(), P["bins"].get<std::size_t>(), windows,
                                     as_doubles(P["tail_alphas"]), spec.seed);
    CsvFile csv(csv_path, spec, "row,alpha,beta,estimate,std_error,bound,pass");
    const double bins = static_cast<double>(rep.histogram.size());
    for (std::size_t b = 0; b < rep.histogram.size(); ++b) {
      const double mass = rep.accepted ? static_cast<double>(rep.histogram[b]) / static_cast<double>(rep.accepted) : 0.0;
      csv.row("bin", static_cast<double>(b) / bins, static_cast<double>(b + 1) / bins, mass,
              binomial_se(mass, rep.accepted), "", "");
    }
    for (const auto& w : rep.windows) csv.row("window", w.alpha, w.beta, w.estimate, w.std_error, w.bound, w.pass);
    for (const auto& t : rep.tail) csv.row("tail", 0.0, t.alpha, t.estimate, "", t.ratio, "");
    csv.close();
    results["accepted"] = rep.accepted;
    results["rejected"] = rep.rejected;
    outcome.pass = rep.pass();
  } else if (spec.kind == "energy") {
    const auto rep = energy_report(*graph, rule, P["vertex"].get<Vertex>(), spec.replicas, spec.horizon,
                                   as_doubles(P["eps"]), as_doubles(P["observe_times"]), spec.seed);
    CsvFile csv(csv_path, spec, "quantity,x,value,std_error,bound");
    bool bound_ok = true;
    for (std::size_t e = 0; e < rep.eps.size(); ++e) {
      const double bound = rep.dimension > 0 ? rep.dimension / rep.eps[e] : NAN;
      csv.row("mean_n_eps", rep.eps[e], rep.mean_n_eps[e], rep.se_n_eps[e], rep.dimension > 0 ? io::format_double(bound) : "");
      if (rep.dimension > 0 && rep.mean_n_eps[e] - 3.0 * rep.se_n_eps[e] > bound) bound_ok = false;
    }
    for (std::size_t k = 0; k < rep.observe_times.size(); ++k) {
      csv.row("mean_abs_deviation", rep.observe_times[k], rep.mean_abs_deviation[k], "", "");
      csv.row("mean_energy", rep.observe_times[k], rep.mean_energy[k], "", "");
    }
    csv.close();
    results["own_flips"] = rep.own_flips;
    results["positive_own_deltas"] = rep.positive_own_deltas;
    results["deviation_slope"] = {{"slope", rep.deviation_slope.slope}, {"std_error", rep.deviation_slope.std_error}};
    results["energy_slope"] = {{"slope", rep.energy_slope.slope}, {"std_error", rep.energy_slope.std_error}};
    outcome.pass = bound_ok && rep.positive_own_deltas == 0;
  } else if (spec.kind == "sequential_bipartite") {
    const double p = P["p"].get<double>();
    const int m = P["m"].get<int>();
    const auto exact = analytic::bipartite_sequence(p, m);
    const auto mc = bipartite_monte_carlo(p, m, spec.replicas, spec.seed);
    CsvFile csv(csv_path, spec, "step,exact,estimate,std_error");
    bool ok = true;
    for (std::size_t k = 0; k < mc.steps.size(); ++k) {
      const double ex = k == 0 ? exact.p0 : (k + 1 < mc.steps.size() ? exact.p1 : exact.p_final);
      csv.row(k, ex, mc.steps[k].value, mc.steps[k].std_error);
      if (std::fabs(mc.steps[k].value - ex) > 3.0 * mc.steps[k].std_error + 1e-15) ok = false;
    }
    csv.close();
    results["p0"] = exact.p0;
    results["p1"] = exact.p1;
    results["p_final"] = exact.p_final;
    results["monotone"] = exact.monotone();
    outcome.pass = ok;
  } else if (spec.kind == "analytic_table") {
    const auto f = P["formula"].get<std::string>();
    CsvFile csv(csv_path, spec, "t,x,value");
    for (double t : as_doubles(P["times"])) {
      for (double xv : as_doubles(P["xs"])) {
        double v = NAN;
        if (f == "p_z") v = analytic::p_z(xv, t);
        else if (f == "mu_kn_odd") v = analytic::mu_kn_odd(P["n"].get<int>(), xv, t);
        else if (f == "mu_kn_even") v = analytic::mu_kn_even(P["n"].get<int>(), xv, t);
        else if (f == "f_interval") v = analytic::f_interval(P["i"].get<int>(), P["j"].get<int>(), P["k"].get<int>(), t);
        else if (f == "interval_prob") v = analytic::interval_prob(P["i"].get<int>(), P["j"].get<int>(), P["k"].get<int>(), xv);
        else if (f == "lehner") v = analytic::lehner_expectation(xv);
        else if (f == "bipartite_sequence") v = analytic::bipartite_sequence(xv, P["m"].get<int>()).p_final;
        csv.row(t, xv, v);
      }
    }
    csv.close();
    results["formula"] = f;
  } else if (spec.kind == "snapshot") {
    auto times = as_doubles(P["times"]);
    std::sort(times.begin(), times.end());
    CsvFile csv(csv_path, spec, "time,file,mean_opinion");
    Simulation sim(*graph, rule, is_binary(rule) ? init_bernoulli(*graph, 0.5, spec.seed) : init_uniform(*graph, spec.seed),
                   derive_seed(spec.seed, 0, static_cast<std::uint64_t>(StreamTag::Clock)), times.back());
    for (double t : times) {
      sim.advance_to(t);
      OpinionConfig c{std::vector<double>(sim.state().begin(), sim.state().end()),
                      is_binary(rule) ? OpinionMode::Binary : OpinionMode::Real};
      std::ostringstream name;
      name << spec.prefix << "_t" << io::format_double(t) << ".pgm";
      io::emit_heatmap(*graph, c, out_dir / name.str());
      outcome.files.push_back(out_dir / name.str());
      double mean = 0.0;
      for (double v : c.values) mean += v / static_cast<double>(c.size());
      csv.row(t, name.str(), mean);
    }
    csv.close();
  }
  outcome.files.push_back(csv_path);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  outcome.summary = {{"kind", spec.kind},     {"spec", spec.to_json()}, {"spec_hash", spec.hash()},
                     {"seed", spec.seed},     {"version", kVersion},    {"wall_time_s", wall},
                     {"pass", outcome.pass},  {"results", results}};
  const auto json_path = out_dir / (spec.prefix + ".json");
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path.string());
  js << outcome.summary.dump(2) << '\n';
  if (!js) throw std::runtime_error("write failed for " + json_path.string());
  outcome.files.push_back(json_path);
  return outcome;
}

}  // namespace mdyn
