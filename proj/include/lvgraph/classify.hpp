#pragma once

#include "lvgraph/dynamics.hpp"
#include "lvgraph/monotone.hpp"
#include "lvgraph/spectral.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lvg {

/// Interior constant equilibrium; triangle = b1 c2 - b2 c1.
struct CoexistencePoint {
  double xi = 0.0;
  double eta = 0.0;
  double triangle = 0.0;
};

/// Errors: DegenerateTriangle (b1 c2 == b2 c1).
CoexistencePoint coexistence_point(const CompetitionParams& p);

enum class RegimeKind {
  UWins,
  VWins,
  Coexist,
  Bistable,
  BothExtinct,
  SemiTrivialU,
  SemiTrivialV,
  CoexistBounds,
  Unresolved,
};

std::string_view to_string(RegimeKind kind);

/// Signed distance to one strict inequality; positive means it holds.
struct Certificate {
  std::string name;
  double margin = 0.0;
};

struct Regime {
  RegimeKind kind = RegimeKind::Unresolved;
  /// Set when the limit is a spatially constant pair.
  std::optional<std::pair<double, double>> constant_limit;
  std::vector<Certificate> certificates;
  /// Present for CoexistBounds when bounds were supplied.
  std::optional<CoexistenceBounds> bounds;

  double margin(std::string_view name) const;
  /// Smallest |margin| over the certificates; distance to the nearest regime edge.
  double min_margin() const;
};

/// Ratio tests of a1/a2 against b1/b2 and c1/c2, decided by cross
/// multiplication. Any equality gives Unresolved. The same tests govern the
/// whole-graph problem.
Regime classify_neumann(const CompetitionParams& p);

/// Refines a Bistable verdict using the boxes around (xi, eta) that the
/// initial data occupy on `active`. Errors: RegimeMismatch (parameters are
/// not bistable).
Regime classify_bistable_basin(const CompetitionParams& p, const FieldPair& initial,
                               const std::vector<std::size_t>& active);

/// Threshold tests a_i vs lambda0_i d_i (equality counts as subcritical)
/// followed by the coexistence condition when both species are supercritical.
Regime classify_dirichlet(const CompetitionParams& p, const EigenPair& eig1, const EigenPair& eig2,
                          std::optional<CoexistenceBounds> bounds = std::nullopt);

struct PredictedLimit {
  RegimeKind kind = RegimeKind::Unresolved;
  std::optional<FieldPair> state;
  std::optional<CoexistenceBounds> bounds;
};

/// Materializes the regime's limit on the problem's vertices: constants on
/// the active set, logistic profiles for the semitrivial cases, the bounds
/// for CoexistBounds. Errors: RequiresSteadySolve (a semitrivial regime on a
/// problem without a Dirichlet partition, or CoexistBounds without bounds),
/// InvalidProblem (Unresolved or undecided Bistable).
PredictedLimit predicted_limit(const Regime& regime, const Problem& problem);

/// sup over the active set of |state - limit|, both species.
double sup_distance(const Problem& problem, const FieldPair& state, const FieldPair& limit);

}  // namespace lvg
