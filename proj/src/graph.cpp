#include "mdyn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace mdyn {

Graph::Graph(std::vector<std::vector<Vertex>> adjacency,
             std::vector<std::vector<int>> labels,
             std::vector<std::optional<double>> frozen)
    : adjacency_(std::move(adjacency)), labels_(std::move(labels)), frozen_(std::move(frozen)) {
  const std::size_t n = adjacency_.size();
  if (!labels_.empty() && labels_.size() != n) {
    throw std::invalid_argument("graph: label count does not match vertex count");
  }
  if (frozen_.empty()) {
    frozen_.resize(n);
  } else if (frozen_.size() != n) {
    throw std::invalid_argument("graph: frozen table size does not match vertex count");
  }
  for (std::size_t x = 0; x < n; ++x) {
    auto& nbrs = adjacency_[x];
    for (Vertex y : nbrs) {
      if (y >= n) throw std::invalid_argument("graph: neighbor id out of range");
      if (y == x) throw std::invalid_argument("graph: explicit self-entry");
    }
    std::vector<Vertex> sorted = nbrs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("graph: duplicate neighbor entry");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (Vertex y : adjacency_[x]) {
      const auto& back = adjacency_[y];
      if (std::find(back.begin(), back.end(), static_cast<Vertex>(x)) == back.end()) {
        throw std::invalid_argument("graph: adjacency is not symmetric");
      }
    }
    if (frozen_[x] && (*frozen_[x] < 0.0 || *frozen_[x] > 1.0)) {
      throw std::invalid_argument("graph: frozen opinion outside [0,1]");
    }
  }
}

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nbrs : adjacency_) total += nbrs.size();
  return total / 2;
}

void Graph::check_vertex(Vertex x) const {
  if (x >= adjacency_.size()) throw std::out_of_range("graph: invalid vertex id");
}

std::span<const Vertex> Graph::neighbors(Vertex x) const {
  check_vertex(x);
  return adjacency_[x];
}

std::span<const int> Graph::label(Vertex x) const {
  check_vertex(x);
  if (labels_.empty()) return {};
  return labels_[x];
}

std::optional<Vertex> Graph::find_label(std::span<const int> coords) const {
  if (torus_dim_ > 0 && static_cast<int>(coords.size()) == torus_dim_) {
    std::size_t id = 0;
    for (int c : coords) {
      if (c < 0 || c >= torus_side_) return std::nullopt;
      id = id * static_cast<std::size_t>(torus_side_) + static_cast<std::size_t>(c);
    }
    return static_cast<Vertex>(id);
  }
  for (std::size_t x = 0; x < labels_.size(); ++x) {
    if (std::equal(labels_[x].begin(), labels_[x].end(), coords.begin(), coords.end())) {
      return static_cast<Vertex>(x);
    }
  }
  return std::nullopt;
}

bool Graph::is_frozen(Vertex x) const {
  check_vertex(x);
  return frozen_[x].has_value();
}

double Graph::frozen_value(Vertex x) const {
  if (!is_frozen(x)) throw std::invalid_argument("graph: vertex is not frozen");
  return *frozen_[x];
}

std::size_t Graph::frozen_count() const {
  return static_cast<std::size_t>(
      std::count_if(frozen_.begin(), frozen_.end(), [](const auto& f) { return f.has_value(); }));
}

Graph with_name(Graph g, std::string name) {
  g.name_ = std::move(name);
  return g;
}

Graph build_complete(int n) {
  if (n < 1) throw std::invalid_argument("build_complete: n must be >= 1");
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x != y) adj[x].push_back(static_cast<Vertex>(y));
    }
  }
  return with_name(Graph(std::move(adj)), "K" + std::to_string(n));
}

Graph build_complete_bipartite(int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("build_complete_bipartite: class sizes must be >= 1");
  const auto n = static_cast<std::size_t>(a + b);
  std::vector<std::vector<Vertex>> adj(n);
  std::vector<std::vector<int>> labels(n);
  for (int i = 0; i < a; ++i) {
    labels[i] = {1, i + 1};
    for (int j = 0; j < b; ++j) {
      adj[i].push_back(static_cast<Vertex>(a + j));
      adj[a + j].push_back(static_cast<Vertex>(i));
    }
  }
  for (int j = 0; j < b; ++j) labels[a + j] = {2, j + 1};
  return with_name(Graph(std::move(adj), std::move(labels)),
                   "K" + std::to_string(a) + "," + std::to_string(b));
}

Graph build_torus(int side, int dim) {
  if (side < 3) throw std::invalid_argument("build_torus: side must be >= 3");
  if (dim < 1 || dim > 3) throw std::invalid_argument("build_torus: dim must be 1, 2 or 3");
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(side);

  std::vector<std::vector<int>> labels(n, std::vector<int>(static_cast<std::size_t>(dim)));
  for (std::size_t id = 0; id < n; ++id) {
    std::size_t rest = id;
    for (int d = dim - 1; d >= 0; --d) {
      labels[id][d] = static_cast<int>(rest % side);
      rest /= side;
    }
  }
  std::size_t stride = 1;
  std::vector<std::size_t> strides(static_cast<std::size_t>(dim));
  for (int d = dim - 1; d >= 0; --d) {
    strides[d] = stride;
    stride *= static_cast<std::size_t>(side);
  }
  std::vector<std::vector<Vertex>> adj(n);
  for (std::size_t id = 0; id < n; ++id) {
    adj[id].reserve(2 * static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const int c = labels[id][d];
      const int down = (c + side - 1) % side;
      const int up = (c + 1) % side;
      adj[id].push_back(static_cast<Vertex>(id - c * strides[d] + down * strides[d]));
      adj[id].push_back(static_cast<Vertex>(id - c * strides[d] + up * strides[d]));
    }
  }
  Graph g(std::move(adj), std::move(labels));
  g.torus_side_ = side;
  g.torus_dim_ = dim;
  g.name_ = dim == 1 ? "C" + std::to_string(side)
                     : "torus" + std::to_string(side) + "x" + std::to_string(dim);
  return g;
}

Graph build_path_with_frozen_boundary(int k, double left, double right) {
  if (k < 1) throw std::invalid_argument("build_path_with_frozen_boundary: k must be >= 1");
  const auto n = static_cast<std::size_t>(k + 2);
  std::vector<std::vector<Vertex>> adj(n);
  std::vector<std::vector<int>> labels(n);
  for (std::size_t x = 0; x + 1 < n; ++x) {
    adj[x].push_back(static_cast<Vertex>(x + 1));
    adj[x + 1].push_back(static_cast<Vertex>(x));
  }
  for (std::size_t x = 0; x < n; ++x) labels[x] = {static_cast<int>(x)};
  std::vector<std::optional<double>> frozen(n);
  frozen.front() = left;
  frozen.back() = right;
  return with_name(Graph(std::move(adj), std::move(labels), std::move(frozen)),
                   "path" + std::to_string(k));
}

std::vector<Vertex> effective_neighborhood(const Graph& g, Vertex x) {
  auto nbrs = g.neighbors(x);
  std::vector<Vertex> pool(nbrs.begin(), nbrs.end());
  if (pool.size() % 2 == 0) pool.push_back(x);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> sphere_sizes(const Graph& g, Vertex x, int r_max) {
  (void)g.neighbors(x);
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(r_max, 0)) + 1, 0);
  std::vector<int> dist(g.vertex_count(), -1);
  std::queue<Vertex> frontier;
  dist[x] = 0;
  frontier.push(x);
  while (!frontier.empty()) {
    const Vertex v = frontier.front();
    frontier.pop();
    if (dist[v] > r_max) break;
    ++counts[static_cast<std::size_t>(dist[v])];
    for (Vertex y : g.neighbors(v)) {
      if (dist[y] < 0) {
        dist[y] = dist[v] + 1;
        frontier.push(y);
      }
    }
  }
  return counts;
}

namespace {

double decay_ratio(int d) {
  if (d < 2) throw std::invalid_argument("growth_functional: degree bound d must be >= 2");
  return static_cast<double>(d - 1) / static_cast<double>(d + 1);
}

}  // namespace

GrowthDescriptor integer_lattice_growth(int dim) {
  switch (dim) {
    case 1:
      return {"Z", [](int) { return 2.0; },
              [](int d) -> std::optional<double> {
                const double q = decay_ratio(d);
                return 2.0 * q / (1.0 - q);
              }};
    case 2:
      return {"Z2", [](int r) { return 4.0 * r; },
              [](int d) -> std::optional<double> {
                const double q = decay_ratio(d);
                return 4.0 * q / ((1.0 - q) * (1.0 - q));
              }};
    case 3:
      // |{v in Z^3 : |v|_1 = r}| = 4r^2 + 2
      return {"Z3", [](int r) { return 4.0 * r * r + 2.0; },
              [](int d) -> std::optional<double> {
                const double q = decay_ratio(d);
                return 4.0 * q * (1.0 + q) / std::pow(1.0 - q, 3) + 2.0 * q / (1.0 - q);
              }};
    default:
      throw std::invalid_argument("integer_lattice_growth: dim must be 1, 2 or 3");
  }
}

GrowthValue growth_functional(const Graph& g, Vertex x, int d, int r_max) {
  const double q = decay_ratio(d);
  if (r_max < 1) throw std::invalid_argument("growth_functional: r_max must be >= 1");
  const auto spheres = sphere_sizes(g, x, r_max);
  GrowthValue out;
  out.r_max = r_max;
  double weight = 1.0;
  for (int r = 1; r <= r_max; ++r) {
    weight *= q;
    out.partial_sum += weight * static_cast<double>(spheres[static_cast<std::size_t>(r)]);
  }
  // Spheres beyond the eccentricity of x are empty on a finite graph.
  std::size_t reached = 0;
  for (auto c : spheres) reached += c;
  if (reached == g.vertex_count()) out.tail = 0.0;
  return out;
}

GrowthValue growth_functional(const GrowthDescriptor& desc, int d, int r_max) {
  const double q = decay_ratio(d);
  if (r_max < 1) throw std::invalid_argument("growth_functional: r_max must be >= 1");
  GrowthValue out;
  out.r_max = r_max;
  double weight = 1.0;
  for (int r = 1; r <= r_max; ++r) {
    weight *= q;
    out.partial_sum += weight * desc.sphere_size(r);
  }
  if (desc.series_limit) {
    if (auto lim = desc.series_limit(d)) out.tail = *lim - out.partial_sum;
  }
  return out;
}

}  // namespace mdyn
