#pragma once

#include "lvgraph/dynamics.hpp"
#include "lvgraph/spectral.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace lvg {

// ---------------------------------------------------------------------------
// Maximum principle for linear weakly coupled systems
//
//   P_k u_k + sum_l h_kl u_l <= 0,  P_k = d/dt - d_k Delta_k,
//
// with h_kl <= 0 for k != l. Used as a test oracle: the check confirms the
// premises on sampled data and then reports whether every u_k stayed <= 0.

struct LinearComponent {
  double diffusion = 1.0;
  Species species = Species::One;
  DomainMode mode = DomainMode::whole_graph();
  BoundaryCondition bc = BoundaryCondition::NoBoundary;
};

struct LinearCoupledSystem {
  const WeightedGraph* graph = nullptr;
  std::vector<LinearComponent> components;
  /// m x m coefficient table h(x, t).
  std::function<Eigen::MatrixXd(std::size_t vertex, double t)> coupling;

  std::size_t size() const { return components.size(); }
};

/// Values u_k and exact time derivatives du_k/dt at one instant.
struct CoupledSample {
  double t = 0.0;
  std::vector<Field> values;
  std::vector<Field> rates;
};

struct MaximumPrincipleVerdict {
  bool nonpositive = false;
  double max_value = -std::numeric_limits<double>::infinity();
  double worst_premise = -std::numeric_limits<double>::infinity();
};

/// Errors: HypothesisNotMet (positive off-diagonal coupling, positive initial
/// value, violated differential or boundary inequality beyond premise_tol),
/// InvalidProblem (malformed system or samples).
MaximumPrincipleVerdict maximum_principle_check(const LinearCoupledSystem& system,
                                                const std::vector<CoupledSample>& samples,
                                                double premise_tol = 1e-9,
                                                double verdict_tol = 1e-9);

// ---------------------------------------------------------------------------
// Coupled upper and lower solutions

using PairFunction = std::function<FieldPair(double)>;

/// upper = (u_hi, v_hi), lower = (u_lo, v_lo) with their time derivatives,
/// defined on [t0, t1].
struct OrderedPair {
  PairFunction upper;
  PairFunction lower;
  PairFunction upper_rate;
  PairFunction lower_rate;
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
};

/// Time-independent pair.
OrderedPair constant_pair(const FieldPair& upper, const FieldPair& lower, double t0 = 0.0,
                          double t1 = std::numeric_limits<double>::infinity());

struct SlackEntry {
  std::string name;
  double worst = std::numeric_limits<double>::infinity();
  double at_time = 0.0;
  std::size_t at_vertex = 0;
};

struct PairReport {
  std::vector<SlackEntry> entries;
  bool passed = false;

  double worst() const;
  const SlackEntry& entry(const std::string& name) const;
};

/// Worst signed slack of each defining inequality over the grid; the
/// competition split makes u_hi pair with v_lo and v_hi pair with u_lo:
///
///   upper-u:  P1 u_hi - f1(u_hi, v_lo) >= 0     lower-u:  P1 u_lo - f1(u_lo, v_hi) <= 0
///   upper-v:  P2 v_hi - f2(u_lo, v_hi) >= 0     lower-v:  P2 v_lo - f2(u_hi, v_lo) <= 0
///   order-u, order-v:  hi - lo >= 0 on the active set
///   boundary-u, boundary-v:  B hi >= 0 >= B lo (skipped without boundary)
///   initial:  hi(t0) >= initial >= lo(t0) (only with `initial`)
///
/// Passes iff every slack >= -pass_tol.
PairReport verify_coupled_pair(const Problem& problem, const OrderedPair& pair,
                               const std::vector<double>& grid,
                               const FieldPair* initial = nullptr, double pass_tol = 1e-9);

// ---------------------------------------------------------------------------
// Exponential envelopes that squeeze the solution into each constant limit.

enum class EnvelopeRegime { VWins = 1, UWins = 2, Coexist = 3 };

struct EnvelopeConstants {
  double epsilon = 0.0;
  double sigma = 0.0;
  double beta = 0.0;  // unused by Coexist
  double q = 0.0;
};

struct Envelope {
  OrderedPair pair;
  EnvelopeConstants constants;
  double limit_u = 0.0;
  double limit_v = 0.0;
};

/// Largest admissible epsilon (exclusive) for the regime. Errors: RegimeMismatch.
double envelope_epsilon_cap(EnvelopeRegime regime, const CompetitionParams& p);

/// Spatially constant envelopes started at t0 from `state_at_t0`. Each free
/// constant (epsilon when absent, sigma, beta, and q for Coexist) is half of
/// its admissible bound. Works for Neumann and whole-graph problems.
///
/// Errors: RegimeMismatch, EpsilonTooLarge, NoAdmissibleSigma,
/// StateOutsideEnvelope (state_at_t0 not strictly below the upper envelope).
Envelope analytic_envelopes(EnvelopeRegime regime, const Problem& problem,
                            std::optional<double> epsilon, double t0,
                            const FieldPair& state_at_t0);

// ---------------------------------------------------------------------------
// Steady states

/// Positive solution of -d Delta s = s (a - E s) on the interior, s = 0 on
/// the boundary. `values` has one entry per vertex, zero off the interior.
struct SteadyState {
  Field values;
  double residual = 0.0;
  int iterations = 0;
  double max_order_violation = 0.0;  // worst breach of lo_i <= lo_{i+1} <= hi_{i+1} <= hi_i
};

/// sup over the interior of |-d Delta s - s (a - E s)|.
double logistic_residual(const WeightedGraph& graph, const DomainPartition& partition,
                         Species species, double d, double a, double E, const Field& s);

/// Monotone iteration between delta*phi and a/E. Errors: NoPositiveState
/// (a <= lambda0 d), NoConvergence (order breached by more than 1e-12 or no
/// convergence within the iteration cap), InvalidParams.
SteadyState logistic_steady_state(const WeightedGraph& graph, const DomainPartition& partition,
                                  Species species, double d, double a, double E,
                                  double tol = 1e-10);

/// Limits of the two ordered Dirichlet marches. s_* bound u, r_* bound v.
struct CoexistenceBounds {
  Field s_upper;
  Field s_lower;
  Field r_upper;
  Field r_lower;
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double margin_u = 0.0;  // a1 - lambda1 d1 - (c1/c2) a2
  double margin_v = 0.0;  // a2 - lambda2 d2 - (b2/b1) a1
  double march_time = 0.0;
  double max_monotone_violation = 0.0;
  bool uniqueness_checked = false;
};

/// Errors: InvalidProblem (bc is not Dirichlet), ConditionK1Violated,
/// EpsilonTooLarge, DeltaTooLarge, NoConvergence.
CoexistenceBounds coexistence_bounds(const Problem& problem, std::optional<double> epsilon,
                                     std::optional<double> delta, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Parabolic monotone iteration

/// max(a1 + 2 b1 M_u + c1 M_v, a2 + b2 M_u + 2 c2 M_v).
double default_lipschitz(const CompetitionParams& p, const RectangleBounds& bounds);

/// Uniform grid on [t0, t1] with steps no larger than h.
std::vector<double> uniform_grid(double t0, double t1, double h);
/// Steps start at h_min and grow geometrically up to h_max.
std::vector<double> graded_grid(double t0, double t1, double h_min, double h_max, double growth);

struct MonotoneSolution {
  Trajectory trajectory;  // midpoint of the final upper and lower sweeps
  int iterations = 0;
  double final_gap = 0.0;            // sup |upper - lower| at exit
  double max_order_violation = 0.0;  // over all iterations
};

/// Upper and lower sweeps of the trapezoidal linear scheme
///
///   (I - h/2 A) w_{n+1} = (I + h/2 A) w_n + h/2 (F_n + F_{n+1}),
///   A = d Delta - M,  F = f(frozen previous iterate) + M * previous,
///
/// started from `pair` and the initial data, until sup |upper - lower| < tol.
/// Step sizes must satisfy h (d deg + M) <= 2 so every sweep preserves order.
///
/// Errors: PairInvalid (pair fails verify_coupled_pair on the grid or grid is
/// malformed), NoConvergence (order breached by more than 1e-12, e.g. M below
/// the Lipschitz bound, or max_iterations exhausted).
MonotoneSolution monotone_solve(const Problem& problem, const OrderedPair& pair,
                                const FieldPair& initial, const std::vector<double>& grid,
                                double lipschitz, double tol, int max_iterations = 5000);

}  // namespace lvg
