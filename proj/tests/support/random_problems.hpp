#pragma once

// Seeded generators for small random graphs, partitions and parameters.

#include "lvgraph/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace lvg::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct GraphShape {
  bool identical_weightings = false;
  bool degree_measure = true;
  double extra_edge_probability = 0.35;
};

/// Random spanning tree plus random chords; weights in [0.5, 2].
inline WeightedGraph random_graph(Rng& rng, std::size_t n, GraphShape shape = {}) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  WeightTable t1, t2;
  auto add = [&](std::size_t a, std::size_t b) {
    const double w1 = uniform(rng, 0.5, 2.0);
    const double w2 = shape.identical_weightings ? w1 : uniform(rng, 0.5, 2.0);
    t1.push_back({names[a], names[b], w1});
    t2.push_back({names[a], names[b], w2});
  };
  std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = pick(rng, 0, i - 1);
    add(i, j);
    has[i][j] = has[j][i] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!has[i][j] && uniform(rng, 0.0, 1.0) < shape.extra_edge_probability) add(i, j);
    }
  }
  std::optional<std::vector<double>> m1, m2;
  if (!shape.degree_measure) {
    m1.emplace();
    m2.emplace();
    for (std::size_t i = 0; i < n; ++i) {
      m1->push_back(uniform(rng, 0.5, 2.0));
      m2->push_back(shape.identical_weightings ? m1->back() : uniform(rng, 0.5, 2.0));
    }
  }
  return build_graph(names, t1, t2, m1, m2);
}

/// Connected interior of `size` vertices grown by breadth-first search, so
/// the interior operator is irreducible. size < graph.size().
inline DomainPartition random_interior(Rng& rng, const WeightedGraph& g, std::size_t size) {
  std::vector<std::size_t> chosen{pick(rng, 0, g.size() - 1)};
  std::vector<bool> in(g.size(), false);
  in[chosen[0]] = true;
  while (chosen.size() < size) {
    std::vector<std::size_t> frontier;
    for (std::size_t x : chosen) {
      for (std::size_t y : g.neighbors(x)) {
        if (!in[y]) frontier.push_back(y);
      }
    }
    const std::size_t y = frontier[pick(rng, 0, frontier.size() - 1)];
    in[y] = true;
    chosen.push_back(y);
  }
  std::sort(chosen.begin(), chosen.end());
  return boundary_of(g, chosen);
}

inline CompetitionParams random_params(Rng& rng) {
  return {uniform(rng, 0.5, 3.0), uniform(rng, 0.5, 3.0), uniform(rng, 0.2, 3.0),
          uniform(rng, 0.5, 3.0), uniform(rng, 0.2, 3.0), uniform(rng, 0.5, 3.0),
          uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 2.0)};
}

/// Random problem on 2..max_n vertices with a random boundary condition.
inline Problem random_problem(Rng& rng, std::size_t max_n, std::optional<BoundaryCondition> bc = {}) {
  const std::size_t n = pick(rng, 2, max_n);
  GraphShape shape;
  shape.degree_measure = uniform(rng, 0.0, 1.0) < 0.5;
  WeightedGraph g = random_graph(rng, n, shape);
  const BoundaryCondition mode =
      bc ? *bc : static_cast<BoundaryCondition>(pick(rng, 0, 2));
  std::optional<DomainPartition> part;
  if (mode != BoundaryCondition::NoBoundary) part = random_interior(rng, g, pick(rng, 1, n - 1));
  return Problem(std::move(g), std::move(part), random_params(rng), mode);
}

/// Nonnegative data on the evolved vertices, 0 elsewhere (Neumann boundary
/// is filled by projection downstream).
inline FieldPair random_initial(Rng& rng, const Problem& problem, double hi = 3.0) {
  const auto n = static_cast<Eigen::Index>(problem.size());
  FieldPair s{Field::Zero(n), Field::Zero(n)};
  for (std::size_t x : problem.evolved()) {
    s.u(x) = uniform(rng, 0.05, hi);
    s.v(x) = uniform(rng, 0.05, hi);
  }
  return s;
}

}  // namespace lvg::testing
