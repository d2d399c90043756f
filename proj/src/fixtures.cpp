#include "lvgraph/fixtures.hpp"

#include "lvgraph/error.hpp"

#include <array>
#include <limits>

namespace lvg {

WeightedGraph five_vertex_graph() {
  const WeightTable w{{"x4", "x1", 1.0}, {"x1", "x2", 1.0}, {"x1", "x3", 1.0},
                      {"x2", "x3", 1.0}, {"x3", "x5", 1.0}};
  return build_graph({"x1", "x2", "x3", "x4", "x5"}, w, w);
}

DomainPartition five_vertex_interior(const WeightedGraph& graph) {
  return boundary_of(graph, std::vector<std::string>{"x1", "x2", "x3"});
}

WeightedGraph triangle_graph() {
  const WeightTable w{{"x1", "x2", 1.0}, {"x2", "x3", 1.0}, {"x1", "x3", 1.0}};
  return build_graph({"x1", "x2", "x3"}, w, w);
}

CompetitionParams example_params(std::string_view set) {
  CompetitionParams p;
  if (set == "i") {
    p = {1, 2, 2, 1, 1, 1, 1, 1};
  } else if (set == "ii") {
    p = {2, 1, 1, 1, 1, 2, 1, 1};
  } else if (set == "iii") {
    p = {2, 1, 1, 3, 1, 2, 1, 1};
  } else if (set == "iv") {
    p = {2, 1, 3, 1, 1, 1, 1, 1};
  } else {
    fail(ErrorCode::UnknownExample, "no parameter set '" + std::string(set) + "'");
  }
  return p;
}

const std::vector<std::string>& reproduction_ids() {
  static const std::vector<std::string> ids{
      "neumann-i", "neumann-ii", "neumann-iii", "neumann-iv-a", "neumann-iv-b",
      "graph-i",   "graph-ii",   "graph-iii",   "graph-iv-a",   "graph-iv-b"};
  return ids;
}

ReproductionCase reproduction_case(std::string_view id) {
  std::string_view set;
  bool neumann = false;
  if (id.starts_with("neumann-")) {
    neumann = true;
    set = id.substr(8);
  } else if (id.starts_with("graph-")) {
    set = id.substr(6);
  } else {
    fail(ErrorCode::UnknownExample, "unknown example '" + std::string(id) + "'");
  }

  std::array<double, 3> u0{7, 6, 5};
  std::array<double, 3> v0{4, 3, 2};
  double lu = 0.0, lv = 0.0;
  std::string_view params;
  if (set == "i") {
    params = "i", lu = 0.0, lv = 1.0;
  } else if (set == "ii") {
    params = "ii", lu = 2.0, lv = 0.0;
  } else if (set == "iii") {
    params = "iii", lu = 1.0, lv = 1.0;
  } else if (set == "iv-a") {
    params = "iv", lu = 2.0, lv = 0.0;
    u0 = {0.6, 1.1, 1.8};
    v0 = {0.1, 0.3, 0.45};
  } else if (set == "iv-b") {
    params = "iv", lu = 0.0, lv = 1.0;
    u0 = {0.1, 0.3, 0.4};
    v0 = {0.6, 0.78, 0.9};
  } else {
    fail(ErrorCode::UnknownExample, "unknown example '" + std::string(id) + "'");
  }

  const double missing = std::numeric_limits<double>::quiet_NaN();
  if (neumann) {
    WeightedGraph g = five_vertex_graph();
    DomainPartition part = five_vertex_interior(g);
    Field u = Field::Constant(5, missing), v = Field::Constant(5, missing);
    for (Eigen::Index i = 0; i < 3; ++i) {
      u(i) = u0[static_cast<std::size_t>(i)];
      v(i) = v0[static_cast<std::size_t>(i)];
    }
    return {std::string(id),
            Problem(std::move(g), std::move(part), example_params(params),
                    BoundaryCondition::Neumann),
            FieldPair{u, v}, lu, lv};
  }
  Field u(3), v(3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    u(i) = u0[static_cast<std::size_t>(i)];
    v(i) = v0[static_cast<std::size_t>(i)];
  }
  return {std::string(id),
          Problem(triangle_graph(), std::nullopt, example_params(params),
                  BoundaryCondition::NoBoundary),
          FieldPair{u, v}, lu, lv};
}

Problem coexistence_fixture() {
  WeightedGraph g = five_vertex_graph();
  DomainPartition part = five_vertex_interior(g);
  const CompetitionParams p{2.0, 1.0, 0.05, 2.0, 0.05, 1.0, 0.1, 0.1};
  return Problem(std::move(g), std::move(part), p, BoundaryCondition::Dirichlet);
}

}  // namespace lvg
