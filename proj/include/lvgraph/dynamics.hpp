#pragma once

#include "lvgraph/graph.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace lvg {

/// Growth (a), self-limitation (b for u, c for v), cross competition
/// (c1: v on u, b2: u on v) and diffusion (d) rates. All strictly positive.
struct CompetitionParams {
  double a1 = 1.0, b1 = 1.0, c1 = 1.0;
  double a2 = 1.0, b2 = 1.0, c2 = 1.0;
  double d1 = 1.0, d2 = 1.0;

  /// Throws InvalidParams unless all eight values are positive and finite.
  void validate() const;
};

enum class BoundaryCondition { NoBoundary, Neumann, Dirichlet };

std::string_view to_string(BoundaryCondition bc);

/// Population densities, one entry per graph vertex. Entries outside the
/// active set (V, or the closure of the interior) are carried as 0.
struct FieldPair {
  Field u;
  Field v;
};

struct Reaction {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// f1 = u (a1 - b1 u - c1 v), f2 = v (a2 - b2 u - c2 v).
Reaction reaction(const CompetitionParams& p, double u, double v);

/// Graph, optional partition, parameters and boundary condition bound
/// together. NoBoundary iff there is no partition.
class Problem {
 public:
  /// Errors: InvalidProblem (bc / partition mismatch), InvalidParams,
  /// EmptyBoundary, IsolatedBoundaryVertex.
  Problem(WeightedGraph graph, std::optional<DomainPartition> partition, CompetitionParams params,
          BoundaryCondition bc);

  const WeightedGraph& graph() const { return graph_; }
  const CompetitionParams& params() const { return params_; }
  BoundaryCondition bc() const { return bc_; }
  bool has_partition() const { return !mode_.is_whole_graph(); }
  const DomainPartition& partition() const { return mode_.partition(); }
  const DomainMode& mode() const { return mode_; }
  std::size_t size() const { return graph_.size(); }

  /// Vertices that carry state: V, or interior + boundary.
  const std::vector<std::size_t>& active() const { return active_; }
  /// Vertices that obey the differential equation: V, or the interior.
  const std::vector<std::size_t>& evolved() const { return evolved_; }

  /// Linear map that imposes the boundary condition for the given species:
  /// identity on evolved vertices, weighted interior average (Neumann) or 0
  /// (Dirichlet) on boundary vertices, 0 off the active set.
  const Eigen::MatrixXd& projector(Species s) const { return projector_[slot(s)]; }
  /// d_k * Laplacian * projector: diffusion acting on an unprojected state.
  const Eigen::MatrixXd& diffusion(Species s) const { return diffusion_[slot(s)]; }
  double diffusion_coefficient(Species s) const { return s == Species::One ? params_.d1 : params_.d2; }

  /// Returns a copy with different parameters (graph and partition reused).
  Problem with_params(const CompetitionParams& params) const;

 private:
  WeightedGraph graph_;
  DomainMode mode_;
  CompetitionParams params_;
  BoundaryCondition bc_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> evolved_;
  std::array<Eigen::MatrixXd, 2> projector_;
  std::array<Eigen::MatrixXd, 2> diffusion_;
};

/// Replaces boundary values by the omega-weighted average of their interior
/// neighbours so the discrete normal derivative vanishes. Errors:
/// InvalidProblem (bc is not Neumann).
FieldPair neumann_project(const Problem& problem, const FieldPair& state);

/// Right-hand side (u', v') of the semi-discrete system at `state`, with the
/// boundary condition imposed first. Zero off the evolved set.
FieldPair vector_field(const Problem& problem, const FieldPair& state);

struct RectangleBounds {
  double m_u = 0.0;
  double m_v = 0.0;
};

/// M_u = max(a1/b1, max u0), M_v = max(a2/c2, max v0) over the active set.
RectangleBounds invariant_rectangle(const Problem& problem, const FieldPair& initial);

struct StepPolicy {
  /// Requested step; 0 selects the stability cap. Never exceeds the cap.
  double dt = 0.0;
  /// Halving a rejected step below this aborts with StepSizeUnstable.
  double dt_min = 1e-10;
};

/// Geometric sample times first, first*ratio, ... plus forced times, plus 0
/// and t_end. A positive `uniform` spacing replaces the geometric part.
struct SampleSchedule {
  double first = 0.01;
  double ratio = 1.05;
  double uniform = 0.0;
  std::vector<double> forced;
};

std::vector<double> sample_times(const SampleSchedule& schedule, double t_end);

struct StepStats {
  double dt = 0.0;          // base step (largest step taken)
  std::size_t steps = 0;    // accepted steps
  std::size_t rejected = 0; // halvings
  std::size_t clamped = 0;  // roundoff negatives set to 0
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FieldPair> states;
  CompetitionParams params;
  BoundaryCondition bc = BoundaryCondition::NoBoundary;
  RectangleBounds bounds;
  StepStats stats;

  const FieldPair& final_state() const { return states.back(); }
};

/// Largest RK4 step admitted for `problem` started inside `bounds`.
double step_cap(const Problem& problem, const RectangleBounds& bounds);

/// Checks and normalizes initial data: missing (NaN) boundary entries are
/// filled by the boundary condition, exterior entries set to 0, Neumann data
/// projected. Errors: MissingVertexValue, NegativeInitial, InvalidInitial
/// (nonzero Dirichlet boundary value).
FieldPair prepare_initial(const Problem& problem, const FieldPair& initial);

/// Fixed-step RK4 marcher. Holds a reference to the problem.
///
/// Each interval between requested times is split into equal substeps no
/// larger than the base step. A step that leaves [0, M_u] x [0, M_v] by
/// more than roundoff is redone as two half steps.
class Integrator {
 public:
  Integrator(const Problem& problem, const FieldPair& initial, const StepPolicy& policy = {});

  void advance_to(double t);

  double time() const { return time_; }
  const FieldPair& state() const { return state_; }
  const RectangleBounds& bounds() const { return bounds_; }
  const StepStats& stats() const { return stats_; }

 private:
  void step(double h);
  bool accept(FieldPair& candidate);
  void rhs(const Field& u, const Field& v, Field& du, Field& dv) const;

  const Problem& problem_;
  StepPolicy policy_;
  RectangleBounds bounds_;
  FieldPair state_;
  double time_ = 0.0;
  StepStats stats_;
  Eigen::VectorXd mask_;
};

/// Errors: InvalidProblem (t_end <= 0), NegativeInitial, InvalidInitial,
/// MissingVertexValue, StepSizeUnstable.
Trajectory integrate(const Problem& problem, const FieldPair& initial, double t_end,
                     const StepPolicy& policy = {}, const SampleSchedule& schedule = {});

}  // namespace lvg
