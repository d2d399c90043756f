#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lvg {

/// Per-vertex values indexed by the graph's vertex order.
using Field = Eigen::VectorXd;

/// Which of the two weightings / measures an operator uses.
enum class Species { One = 0, Two = 1 };

constexpr std::size_t slot(Species s) { return static_cast<std::size_t>(s); }

struct WeightEntry {
  std::string a;
  std::string b;
  double weight = 1.0;
};

using WeightTable = std::vector<WeightEntry>;

/// Finite connected graph carrying two symmetric weightings over one edge set
/// and two strictly positive vertex measures. Immutable after construction.
///
/// Vertex order is the insertion order passed to build_graph(); every Field,
/// matrix row and CSV column downstream uses that order.
class WeightedGraph {
 public:
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws ErrorCode::UnknownVertex.
  std::size_t index_of(std::string_view name) const;

  double weight(Species s, std::size_t x, std::size_t y) const { return weights_[slot(s)](x, y); }
  double measure(Species s, std::size_t x) const { return measures_[slot(s)](x); }
  const Eigen::MatrixXd& weights(Species s) const { return weights_[slot(s)]; }
  const Eigen::VectorXd& measures(Species s) const { return measures_[slot(s)]; }

  const std::vector<std::size_t>& neighbors(std::size_t x) const { return adjacency_.at(x); }
  bool adjacent(std::size_t x, std::size_t y) const { return weights_[0](x, y) > 0.0; }

  /// True when omega^1 == omega^2 and mu^1 == mu^2 entrywise.
  bool identical_weightings() const;

 private:
  friend WeightedGraph build_graph(std::vector<std::string>, const WeightTable&, const WeightTable&,
                                   std::optional<std::vector<double>>,
                                   std::optional<std::vector<double>>);

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::array<Eigen::MatrixXd, 2> weights_;
  std::array<Eigen::VectorXd, 2> measures_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Validates and assembles a graph. Entries are undirected; listing both
/// (a,b) and (b,a) is allowed only with equal weights. A missing measure
/// defaults to the weighted degree mu(x) = sum_y w(x,y) of that species.
///
/// Errors: NotConnected, AsymmetricWeight, NonpositiveMeasure, NonpositiveWeight,
/// SelfLoop, TopologyMismatch (the two tables induce different edge sets),
/// UnknownVertex.
WeightedGraph build_graph(std::vector<std::string> vertices, const WeightTable& weights_1,
                          const WeightTable& weights_2,
                          std::optional<std::vector<double>> measure_1 = std::nullopt,
                          std::optional<std::vector<double>> measure_2 = std::nullopt);

/// Interior set, its vertex boundary and their union.
class DomainPartition {
 public:
  enum class Role { Exterior, Interior, Boundary };

  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  /// Interior followed by boundary, each in vertex order.
  const std::vector<std::size_t>& closure() const { return closure_; }

  Role role(std::size_t x) const { return roles_.at(x); }
  bool is_interior(std::size_t x) const { return role(x) == Role::Interior; }
  bool is_boundary(std::size_t x) const { return role(x) == Role::Boundary; }
  bool in_closure(std::size_t x) const { return role(x) != Role::Exterior; }
  std::size_t graph_size() const { return roles_.size(); }

 private:
  friend DomainPartition boundary_of(const WeightedGraph&, std::span<const std::size_t>);

  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> closure_;
  std::vector<Role> roles_;
};

/// boundary = { z not in interior : z ~ y for some interior y }.
/// Errors: InteriorNotSubset (empty interior, repeated or out-of-range index,
/// or interior == V), EmptyBoundary.
DomainPartition boundary_of(const WeightedGraph& graph, std::span<const std::size_t> interior);
DomainPartition boundary_of(const WeightedGraph& graph, const std::vector<std::string>& interior);

/// Whole-graph operator (sums over V, evaluated everywhere) or subgraph
/// operator (sums over the closure, evaluated on the interior).
class DomainMode {
 public:
  static DomainMode whole_graph() { return DomainMode{}; }
  static DomainMode subgraph(DomainPartition partition) {
    DomainMode m;
    m.partition_ = std::move(partition);
    return m;
  }

  bool is_whole_graph() const { return !partition_.has_value(); }
  const DomainPartition& partition() const;

  /// Vertices where the operator is evaluated.
  std::vector<std::size_t> evaluated(std::size_t n) const;
  /// Vertices whose values the operator reads.
  std::vector<std::size_t> support(std::size_t n) const;

 private:
  std::optional<DomainPartition> partition_;
};

/// Delta u(x) = sum_y (u(y) - u(x)) w(y,x) / mu(x).
///
/// The result has one entry per graph vertex; entries at vertices where the
/// operator is not evaluated (outside the interior in subgraph mode) are 0.
/// A NaN or a short field at a vertex the operator reads raises
/// MissingVertexValue.
Field laplacian_apply(const WeightedGraph& graph, Species species, const DomainMode& mode,
                      const Field& field);

/// Dense n x n matrix L with (L u)(x) == laplacian_apply(...)(x) for every x.
Eigen::MatrixXd laplacian_matrix(const WeightedGraph& graph, Species species,
                                 const DomainMode& mode);

/// sum_{y in interior} (u(x) - u(y)) w(x,y) / mu(x) at boundary vertex x.
/// Errors: NotBoundaryVertex, MissingVertexValue.
double normal_derivative(const WeightedGraph& graph, Species species,
                         const DomainPartition& partition, const Field& field,
                         std::size_t boundary_vertex);

/// max over evaluated x of sum_y w(x,y) / mu(x); the operator norm scale
/// used for step-size caps.
double max_weighted_degree(const WeightedGraph& graph, Species species, const DomainMode& mode);

}  // namespace lvg
