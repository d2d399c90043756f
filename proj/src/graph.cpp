#include "lvgraph/graph.hpp"

#include "lvgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace lvg {

std::optional<std::size_t> WeightedGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t WeightedGraph::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  fail(ErrorCode::UnknownVertex, "no vertex named '" + std::string(name) + "'");
}

bool WeightedGraph::identical_weightings() const {
  return weights_[0] == weights_[1] && measures_[0] == measures_[1];
}

namespace {

Eigen::MatrixXd assemble_weights(const WeightedGraph& g, const WeightTable& table,
                                 std::string_view label) {
  const std::size_t n = g.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : table) {
    const std::size_t a = g.index_of(e.a);
    const std::size_t b = g.index_of(e.b);
    if (a == b) fail(ErrorCode::SelfLoop, "self loop at '" + e.a + "'");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      fail(ErrorCode::NonpositiveWeight, std::string(label) + " weight on " + e.a + "-" + e.b +
                                             " must be positive and finite");
    }
    if (w(a, b) != 0.0 && w(a, b) != e.weight) {
      fail(ErrorCode::AsymmetricWeight,
           std::string(label) + " weight on " + e.a + "-" + e.b + " given inconsistently");
    }
    w(a, b) = e.weight;
    w(b, a) = e.weight;
  }
  return w;
}

bool connected(const Eigen::MatrixXd& w) {
  const auto n = static_cast<std::size_t>(w.rows());
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    for (std::size_t y = 0; y < n; ++y) {
      if (!seen[y] && w(x, y) > 0.0) {
        seen[y] = true;
        ++count;
        q.push(y);
      }
    }
  }
  return count == n;
}

void require_values(const Field& field, std::size_t n, const std::vector<std::size_t>& where) {
  if (static_cast<std::size_t>(field.size()) != n) {
    fail(ErrorCode::MissingVertexValue, "field has " + std::to_string(field.size()) +
                                            " entries, graph has " + std::to_string(n));
  }
  for (std::size_t x : where) {
    if (std::isnan(field(x))) {
      fail(ErrorCode::MissingVertexValue, "no value at vertex index " + std::to_string(x));
    }
  }
}

}  // namespace

WeightedGraph build_graph(std::vector<std::string> vertices, const WeightTable& weights_1,
                          const WeightTable& weights_2, std::optional<std::vector<double>> measure_1,
                          std::optional<std::vector<double>> measure_2) {
  WeightedGraph g;
  g.names_ = std::move(vertices);
  for (std::size_t i = 0; i < g.names_.size(); ++i) {
    if (!g.index_.emplace(g.names_[i], i).second) {
      fail(ErrorCode::InvalidProblem, "duplicate vertex '" + g.names_[i] + "'");
    }
  }
  if (g.names_.empty()) fail(ErrorCode::NotConnected, "graph has no vertices");
  const std::size_t n = g.size();

  g.weights_[0] = assemble_weights(g, weights_1, "species-1");
  g.weights_[1] = assemble_weights(g, weights_2, "species-2");
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if ((g.weights_[0](x, y) > 0.0) != (g.weights_[1](x, y) > 0.0)) {
        fail(ErrorCode::TopologyMismatch,
             "edge " + g.names_[x] + "-" + g.names_[y] + " present in only one weighting");
      }
    }
  }
  if (!connected(g.weights_[0])) fail(ErrorCode::NotConnected, "graph is not connected");

  std::array<std::optional<std::vector<double>>, 2> given{std::move(measure_1),
                                                          std::move(measure_2)};
  for (std::size_t k = 0; k < 2; ++k) {
    if (given[k]) {
      if (given[k]->size() != n) {
        fail(ErrorCode::NonpositiveMeasure, "measure " + std::to_string(k + 1) + " has " +
                                                std::to_string(given[k]->size()) + " entries");
      }
      g.measures_[k] = Eigen::Map<const Eigen::VectorXd>(given[k]->data(),
                                                         static_cast<Eigen::Index>(n));
    } else {
      g.measures_[k] = g.weights_[k].rowwise().sum();
    }
    for (std::size_t x = 0; x < n; ++x) {
      const double m = g.measures_[k](x);
      if (!(m > 0.0) || !std::isfinite(m)) {
        fail(ErrorCode::NonpositiveMeasure,
             "measure " + std::to_string(k + 1) + " at '" + g.names_[x] + "' is not positive");
      }
    }
  }

  g.adjacency_.assign(n, {});
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (g.weights_[0](x, y) > 0.0) g.adjacency_[x].push_back(y);
    }
  }
  return g;
}

DomainPartition boundary_of(const WeightedGraph& graph, std::span<const std::size_t> interior) {
  const std::size_t n = graph.size();
  DomainPartition p;
  p.roles_.assign(n, DomainPartition::Role::Exterior);
  if (interior.empty()) fail(ErrorCode::InteriorNotSubset, "interior is empty");
  for (std::size_t x : interior) {
    if (x >= n) fail(ErrorCode::InteriorNotSubset, "interior index out of range");
    if (p.roles_[x] == DomainPartition::Role::Interior) {
      fail(ErrorCode::InteriorNotSubset, "interior lists '" + graph.name(x) + "' twice");
    }
    p.roles_[x] = DomainPartition::Role::Interior;
  }
  if (interior.size() == n) {
    fail(ErrorCode::InteriorNotSubset, "interior is the whole vertex set");
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (p.roles_[x] != DomainPartition::Role::Exterior) continue;
    for (std::size_t y : graph.neighbors(x)) {
      if (p.roles_[y] == DomainPartition::Role::Interior) {
        p.roles_[x] = DomainPartition::Role::Boundary;
        break;
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (p.roles_[x] == DomainPartition::Role::Interior) p.interior_.push_back(x);
    if (p.roles_[x] == DomainPartition::Role::Boundary) p.boundary_.push_back(x);
  }
  if (p.boundary_.empty()) fail(ErrorCode::EmptyBoundary, "interior has no vertex boundary");
  p.closure_ = p.interior_;
  p.closure_.insert(p.closure_.end(), p.boundary_.begin(), p.boundary_.end());
  return p;
}

DomainPartition boundary_of(const WeightedGraph& graph, const std::vector<std::string>& interior) {
  std::vector<std::size_t> idx;
  idx.reserve(interior.size());
  for (const auto& name : interior) idx.push_back(graph.index_of(name));
  return boundary_of(graph, idx);
}

const DomainPartition& DomainMode::partition() const {
  if (!partition_) fail(ErrorCode::InvalidProblem, "whole-graph mode has no partition");
  return *partition_;
}

std::vector<std::size_t> DomainMode::evaluated(std::size_t n) const {
  if (partition_) return partition_->interior();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return all;
}

std::vector<std::size_t> DomainMode::support(std::size_t n) const {
  if (partition_) return partition_->closure();
  return evaluated(n);
}

Field laplacian_apply(const WeightedGraph& graph, Species species, const DomainMode& mode,
                      const Field& field) {
  const std::size_t n = graph.size();
  require_values(field, n, mode.support(n));
  const auto& w = graph.weights(species);
  const auto& mu = graph.measures(species);
  Field out = Field::Zero(static_cast<Eigen::Index>(n));
  const bool whole = mode.is_whole_graph();
  for (std::size_t x : mode.evaluated(n)) {
    double acc = 0.0;
    for (std::size_t y : graph.neighbors(x)) {
      if (!whole && !mode.partition().in_closure(y)) continue;
      acc += (field(y) - field(x)) * w(y, x);
    }
    out(x) = acc / mu(x);
  }
  return out;
}

Eigen::MatrixXd laplacian_matrix(const WeightedGraph& graph, Species species,
                                 const DomainMode& mode) {
  const std::size_t n = graph.size();
  const auto& w = graph.weights(species);
  const auto& mu = graph.measures(species);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const bool whole = mode.is_whole_graph();
  for (std::size_t x : mode.evaluated(n)) {
    for (std::size_t y : graph.neighbors(x)) {
      if (!whole && !mode.partition().in_closure(y)) continue;
      const double c = w(y, x) / mu(x);
      L(x, y) += c;
      L(x, x) -= c;
    }
  }
  return L;
}

double normal_derivative(const WeightedGraph& graph, Species species,
                         const DomainPartition& partition, const Field& field,
                         std::size_t boundary_vertex) {
  if (boundary_vertex >= graph.size() || !partition.is_boundary(boundary_vertex)) {
    fail(ErrorCode::NotBoundaryVertex, "vertex index " + std::to_string(boundary_vertex) +
                                           " is not on the boundary");
  }
  std::vector<std::size_t> read{boundary_vertex};
  for (std::size_t y : graph.neighbors(boundary_vertex)) {
    if (partition.is_interior(y)) read.push_back(y);
  }
  require_values(field, graph.size(), read);
  const auto& w = graph.weights(species);
  double acc = 0.0;
  for (std::size_t i = 1; i < read.size(); ++i) {
    acc += (field(boundary_vertex) - field(read[i])) * w(boundary_vertex, read[i]);
  }
  return acc / graph.measure(species, boundary_vertex);
}

double max_weighted_degree(const WeightedGraph& graph, Species species, const DomainMode& mode) {
  const std::size_t n = graph.size();
  const bool whole = mode.is_whole_graph();
  double best = 0.0;
  for (std::size_t x : mode.evaluated(n)) {
    double acc = 0.0;
    for (std::size_t y : graph.neighbors(x)) {
      if (!whole && !mode.partition().in_closure(y)) continue;
      acc += graph.weight(species, x, y);
    }
    best = std::max(best, acc / graph.measure(species, x));
  }
  return best;
}

}  // namespace lvg
