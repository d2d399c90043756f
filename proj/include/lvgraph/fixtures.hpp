#pragma once

#include "lvgraph/dynamics.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lvg {

/// Five-vertex graph: x4-x1, x1-x2, x1-x3, x2-x3, x3-x5, unit weights,
/// degree measure. Interior {x1, x2, x3}, boundary {x4, x5}.
WeightedGraph five_vertex_graph();
DomainPartition five_vertex_interior(const WeightedGraph& graph);

/// Triangle x1, x2, x3 with unit weights and degree measure (2 each).
WeightedGraph triangle_graph();

/// Parameter sets with unit diffusion:
///   'i'   a=(1,1) b=(2,1) c=(2,1)  v excludes u
///   'ii'  a=(2,1) b=(1,1) c=(1,2)  u excludes v
///   'iii' a=(2,3) b=(1,1) c=(1,2)  coexistence at (1,1)
///   'iv'  a=(2,1) b=(1,1) c=(3,1)  bistable, saddle at (0.5,0.5)
CompetitionParams example_params(std::string_view set);

struct ReproductionCase {
  std::string id;
  Problem problem;
  FieldPair initial;  // boundary entries NaN for Neumann cases (filled by projection)
  double limit_u = 0.0;
  double limit_v = 0.0;
};

/// neumann-{i,ii,iii,iv-a,iv-b} on the five-vertex graph with Neumann
/// boundary, graph-{...} on the triangle without boundary.
const std::vector<std::string>& reproduction_ids();

/// Errors: UnknownExample.
ReproductionCase reproduction_case(std::string_view id);

/// Dirichlet problem on the five-vertex graph with d=(0.1,0.1), a=(2,2),
/// b=(1,0.05), c=(0.05,1).
Problem coexistence_fixture();

}  // namespace lvg
