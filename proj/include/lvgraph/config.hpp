#pragma once

#include "lvgraph/dynamics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lvg {

/// One swept parameter: `count` evenly spaced values in [lo, hi].
struct SweepAxis {
  std::string param;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  double value(std::size_t i) const;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::size_t max_points = 10000;

  std::size_t points() const;
};

/// Parsed and validated run description. Vertex order is the order of the
/// `vertices` array; every per-vertex array and CSV column follows it.
///
/// JSON layout:
///   graph:    { vertices: [names], edges: [[a, b, w1, w2?], ...],
///               measures: { "1": [...], "2": [...] } (optional, default degree),
///               interior: [names] (optional) }
///   bc:       "none" | "neumann" | "dirichlet"
///   params:   { a1, b1, c1, a2, b2, c2, d1, d2 }
///   initial:  { u: number | [per vertex, null = unset] | {name: value}, v: same }
///   t_end, dt, tol, out, workers
///   samples:  { first, ratio, uniform, forced: [...] }
///   sweep:    { axes: { a1: [lo, hi, count], ... }, max_points }
struct RunConfig {
  std::vector<std::string> vertices;
  WeightTable weights_1;
  WeightTable weights_2;
  std::optional<std::vector<double>> measure_1;
  std::optional<std::vector<double>> measure_2;
  std::optional<std::vector<std::string>> interior;
  BoundaryCondition bc = BoundaryCondition::NoBoundary;
  CompetitionParams params;
  FieldPair initial;  // NaN marks an unset entry
  double t_end = 100.0;
  StepPolicy step;
  SampleSchedule samples;
  double tol = 1e-9;  // solver tolerance for classify and steady
  std::string out = "out";
  int workers = 1;
  std::optional<SweepSpec> sweep;

  Problem make_problem() const;
  Problem make_problem(const CompetitionParams& params) const;
};

/// Errors: ConfigInvalid for any malformed, inconsistent or invalid field
/// (including graph, parameter and initial-data violations, whose original
/// error name is kept in the message).
RunConfig parse_config(std::string_view json_text);

/// Errors: IoFailure (unreadable file), ConfigInvalid.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace lvg
