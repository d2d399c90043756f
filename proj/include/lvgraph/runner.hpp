#pragma once

#include "lvgraph/classify.hpp"
#include "lvgraph/config.hpp"
#include "lvgraph/dynamics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lvg {

/// "%.17g": round-trips every double.
std::string format_double(double x);

/// Writes to a sibling temporary and renames over `path`. Errors: IoFailure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Header `t,u@<vertex>...,v@<vertex>...` over the active vertices in vertex
/// order, one row per sample.
std::string trajectory_csv(const Problem& problem, const Trajectory& trajectory);

/// Classification with whatever the problem needs: ratio tests (plus the
/// basin refinement for bistable parameters) without a Dirichlet boundary,
/// eigenpairs and, when the coexistence condition holds, the ordered
/// marches with one.
Regime classify_problem(const Problem& problem, const FieldPair& initial, double tol = 1e-9);

/// Distance from `state` to a predicted limit: sup-distance to a limit state,
/// or the largest excursion outside [lower, upper] for bounds.
double limit_distance(const Problem& problem, const FieldPair& state, const PredictedLimit& limit);

struct RunReport {
  FieldPair final_state;
  double final_time = 0.0;
  RectangleBounds bounds;
  StepStats stats;
  std::optional<Regime> regime;
  /// max over samples with t >= 0.9 t_end of limit_distance; unset when the
  /// regime has no limit to compare with.
  std::optional<double> trailing_distance;
  bool invariants_ok = true;
  std::vector<std::string> violations;
  double seconds = 0.0;
  std::vector<std::string> manifest;
};

/// Integrates, checks positivity, the invariant rectangle and (Neumann) the
/// zero normal derivative on every sample, and classifies. With
/// `write_files`, creates cfg.out with trajectory.csv and summary.json.
/// Errors: ConfigInvalid, IoFailure, StepSizeUnstable.
RunReport run_simulate(const RunConfig& config, bool write_files = true);

struct ReproduceReport {
  std::string id;
  bool passed = false;
  double limit_u = 0.0;
  double limit_v = 0.0;
  double distance = 0.0;  // sup-distance at t_end
  double tolerance = 1e-3;
  double t_end = 1000.0;
  /// First sample time from which the distance stays below the tolerance.
  std::optional<double> settled_at;
  double seconds = 0.0;
  std::vector<std::string> manifest;
};

/// Runs one hard-coded reproduction case. With `out_dir`, writes its
/// trajectory.csv and summary.json there. Errors: UnknownExample.
ReproduceReport run_reproduce(std::string_view id, const std::optional<std::filesystem::path>& out_dir,
                              double t_end = 1000.0, double tolerance = 1e-3);

struct SweepRow {
  std::size_t index = 0;
  CompetitionParams params;
  RegimeKind kind = RegimeKind::Unresolved;
  std::vector<Certificate> certificates;
  double min_margin = 0.0;
  double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;  // endpoint over the active set
  std::optional<double> distance;
  /// "yes", "no", "na" (nothing to compare) or "error: ...".
  std::string agreement;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::filesystem::path csv_path;
  std::size_t disagreements = 0;  // "no" rows with min_margin > exempt_margin
  std::size_t failures = 0;       // rows that raised
  double seconds = 0.0;
};

/// Sweeps the grid in cfg.sweep: every point is classified and simulated to
/// cfg.t_end from cfg.initial. Points run on up to `workers` threads; each
/// writes its own row file atomically, merged into sweep.csv afterwards.
/// Errors: ConfigInvalid (no sweep block, invalid parameters at a point),
/// GridTooLarge, IoFailure.
SweepReport run_sweep(const RunConfig& config, int workers, double agreement_tol = 1e-2,
                      double exempt_margin = 0.05);

/// `lambda0_<k>,<value>` lines then `vertex,phi1,phi2` over the interior.
/// Errors: ConfigInvalid (no Dirichlet partition).
std::string run_eigen(const RunConfig& config);

/// Writes steady.csv (vertex,s1,s2: logistic states, 0 where none exists)
/// and, when the coexistence condition holds, bounds.csv
/// (vertex,s_lo,s_hi,r_lo,r_hi) under cfg.out. Returns the text printed.
std::string run_steady(const RunConfig& config);

/// Regime kind, certificates with margins and the predicted limit. Non-constant
/// limits are written to cfg.out/limit.csv and referenced by path.
std::string run_classify(const RunConfig& config);

}  // namespace lvg
