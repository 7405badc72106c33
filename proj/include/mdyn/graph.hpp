#ifndef MDYN_GRAPH_HPP
#define MDYN_GRAPH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdyn {

using Vertex = std::uint32_t;

/// Finite simple undirected graph with optional coordinate labels and
/// frozen (non-updating) vertices.
///
/// Adjacency is symmetric, duplicate-free and never lists a vertex as its own
/// neighbor. The self-inclusion convention for even degrees is applied at
/// query time by effective_neighborhood().
class Graph {
 public:
  Graph() = default;

  /// Validates symmetry, range and absence of duplicates/self-entries.
  /// Throws std::invalid_argument on violation.
  explicit Graph(std::vector<std::vector<Vertex>> adjacency,
                 std::vector<std::vector<int>> labels = {},
                 std::vector<std::optional<double>> frozen = {});

  [[nodiscard]] std::size_t vertex_count() const { return adjacency_.size(); }
  [[nodiscard]] std::size_t edge_count() const;
  [[nodiscard]] std::size_t degree(Vertex x) const { return neighbors(x).size(); }
  [[nodiscard]] std::span<const Vertex> neighbors(Vertex x) const;
  [[nodiscard]] const std::vector<std::vector<Vertex>>& adjacency() const { return adjacency_; }

  [[nodiscard]] bool has_labels() const { return !labels_.empty(); }
  [[nodiscard]] std::span<const int> label(Vertex x) const;
  /// Inverse of label() for lattice graphs; std::nullopt when absent.
  [[nodiscard]] std::optional<Vertex> find_label(std::span<const int> coords) const;

  [[nodiscard]] bool is_frozen(Vertex x) const;
  /// Fixed opinion of a frozen vertex; throws if x is not frozen.
  [[nodiscard]] double frozen_value(Vertex x) const;
  [[nodiscard]] const std::vector<std::optional<double>>& frozen() const { return frozen_; }
  [[nodiscard]] std::size_t frozen_count() const;

  /// Lattice side and dimension when built by build_torus (0 otherwise).
  [[nodiscard]] int torus_side() const { return torus_side_; }
  [[nodiscard]] int torus_dim() const { return torus_dim_; }

  /// Short identifier used in result files ("K5", "torus10x2", ...).
  [[nodiscard]] const std::string& name() const { return name_; }

  friend Graph build_torus(int side, int dim);
  friend Graph with_name(Graph g, std::string name);

 private:
  void check_vertex(Vertex x) const;

  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::vector<int>> labels_;
  std::vector<std::optional<double>> frozen_;
  std::string name_;
  int torus_side_ = 0;
  int torus_dim_ = 0;
};

Graph with_name(Graph g, std::string name);

Graph build_complete(int n);
/// Class 1 vertices are ids 0..a-1 labeled (1,i), class 2 are a..a+b-1
/// labeled (2,j), with i and j one-based.
Graph build_complete_bipartite(int a, int b);
/// Periodic lattice {0..side-1}^dim; vertex id is row-major in the labels.
Graph build_torus(int side, int dim);
inline Graph build_cycle(int n) { return build_torus(n, 1); }
/// Vertices 0 and k+1 are frozen at `left` and `right`; 1..k are the interior.
Graph build_path_with_frozen_boundary(int k, double left, double right);

/// N(x), plus x itself when deg(x) is even; sorted, always odd-sized.
[[nodiscard]] std::vector<Vertex> effective_neighborhood(const Graph& g, Vertex x);

/// Number of vertices at graph distance exactly r from x, for r = 0..r_max.
[[nodiscard]] std::vector<std::size_t> sphere_sizes(const Graph& g, Vertex x, int r_max);

/// Symbolic sphere-size law of an infinite vertex-transitive graph.
struct GrowthDescriptor {
  std::string name;
  std::function<double(int)> sphere_size;
  /// Closed form of the full series as a function of the degree bound d,
  /// when one exists.
  std::function<std::optional<double>(int)> series_limit;
};

/// Sphere sizes of the L1 ball in Z^dim (dim in 1..3).
GrowthDescriptor integer_lattice_growth(int dim);

struct GrowthValue {
  double partial_sum = 0.0;
  int r_max = 0;
  /// Exact limit minus partial sum, when the limit is known.
  std::optional<double> tail;
  [[nodiscard]] std::optional<double> limit() const {
    if (!tail) return std::nullopt;
    return partial_sum + *tail;
  }
};

/// Truncated growth functional sum_{r=1}^{r_max} ((d+1)/(d-1))^{-r} n_r(G,x).
GrowthValue growth_functional(const Graph& g, Vertex x, int d, int r_max);
GrowthValue growth_functional(const GrowthDescriptor& desc, int d, int r_max);

}  // namespace mdyn

#endif  // MDYN_GRAPH_HPP
