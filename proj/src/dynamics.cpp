#include "lvgraph/dynamics.hpp"

#include "lvgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lvg {

namespace {

constexpr double kClampFloor = -1e-12;
constexpr double kRectangleSlack = 1e-9;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

void CompetitionParams::validate() const {
  const double all[] = {a1, b1, c1, a2, b2, c2, d1, d2};
  const char* names[] = {"a1", "b1", "c1", "a2", "b2", "c2", "d1", "d2"};
  for (std::size_t i = 0; i < 8; ++i) {
    if (!positive_finite(all[i])) {
      fail(ErrorCode::InvalidParams, std::string(names[i]) + " must be positive and finite");
    }
  }
}

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::NoBoundary: return "none";
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Dirichlet: return "dirichlet";
  }
  return "?";
}

Reaction reaction(const CompetitionParams& p, double u, double v) {
  return {u * (p.a1 - p.b1 * u - p.c1 * v), v * (p.a2 - p.b2 * u - p.c2 * v)};
}

Problem::Problem(WeightedGraph graph, std::optional<DomainPartition> partition,
                 CompetitionParams params, BoundaryCondition bc)
    : graph_(std::move(graph)), mode_(DomainMode::whole_graph()), params_(params), bc_(bc) {
  params_.validate();
  const bool needs_partition = bc_ != BoundaryCondition::NoBoundary;
  if (needs_partition != partition.has_value()) {
    fail(ErrorCode::InvalidProblem,
         needs_partition ? "boundary condition requires an interior set"
                         : "whole-graph problem must not carry an interior set");
  }
  const std::size_t n = graph_.size();
  if (partition) {
    if (partition->graph_size() != n) {
      fail(ErrorCode::InvalidProblem, "partition built for a different graph");
    }
    if (partition->boundary().empty()) fail(ErrorCode::EmptyBoundary, "no boundary vertices");
    mode_ = DomainMode::subgraph(std::move(*partition));
  }
  active_ = mode_.support(n);
  std::sort(active_.begin(), active_.end());
  evolved_ = mode_.evaluated(n);

  for (Species s : {Species::One, Species::Two}) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t x : evolved_) P(x, x) = 1.0;
    if (bc_ == BoundaryCondition::Neumann) {
      const auto& part = mode_.partition();
      for (std::size_t z : part.boundary()) {
        double total = 0.0;
        for (std::size_t y : graph_.neighbors(z)) {
          if (part.is_interior(y)) total += graph_.weight(s, z, y);
        }
        if (!(total > 0.0)) {
          fail(ErrorCode::IsolatedBoundaryVertex,
               "boundary vertex '" + graph_.name(z) + "' has no interior neighbour");
        }
        for (std::size_t y : graph_.neighbors(z)) {
          if (part.is_interior(y)) P(z, y) = graph_.weight(s, z, y) / total;
        }
      }
    }
    projector_[slot(s)] = P;
    const double d = diffusion_coefficient(s);
    diffusion_[slot(s)] = d * laplacian_matrix(graph_, s, mode_) * P;
  }
}

Problem Problem::with_params(const CompetitionParams& params) const {
  std::optional<DomainPartition> part;
  if (has_partition()) part = partition();
  return Problem(graph_, std::move(part), params, bc_);
}

FieldPair neumann_project(const Problem& problem, const FieldPair& state) {
  if (problem.bc() != BoundaryCondition::Neumann) {
    fail(ErrorCode::InvalidProblem, "projection applies to Neumann problems only");
  }
  const auto& g = problem.graph();
  const auto& part = problem.partition();
  FieldPair out = state;
  auto project = [&](Field& f, Species s) {
    for (std::size_t z : part.boundary()) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t y : g.neighbors(z)) {
        if (!part.is_interior(y)) continue;
        num += g.weight(s, z, y) * f(y);
        den += g.weight(s, z, y);
      }
      if (!(den > 0.0)) {
        fail(ErrorCode::IsolatedBoundaryVertex,
             "boundary vertex '" + g.name(z) + "' has no interior neighbour");
      }
      f(z) = num / den;
    }
  };
  project(out.u, Species::One);
  project(out.v, Species::Two);
  return out;
}

FieldPair vector_field(const Problem& problem, const FieldPair& state) {
  const auto n = static_cast<Eigen::Index>(problem.size());
  FieldPair out{problem.diffusion(Species::One) * state.u,
                problem.diffusion(Species::Two) * state.v};
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(n);
  for (std::size_t x : problem.evolved()) {
    const Reaction f = reaction(problem.params(), state.u(x), state.v(x));
    out.u(x) += f.f1;
    out.v(x) += f.f2;
    mask(x) = 1.0;
  }
  out.u = out.u.cwiseProduct(mask);
  out.v = out.v.cwiseProduct(mask);
  return out;
}

RectangleBounds invariant_rectangle(const Problem& problem, const FieldPair& initial) {
  const auto& p = problem.params();
  RectangleBounds r{p.a1 / p.b1, p.a2 / p.c2};
  for (std::size_t x : problem.active()) {
    if (x < static_cast<std::size_t>(initial.u.size()) && std::isfinite(initial.u(x))) {
      r.m_u = std::max(r.m_u, initial.u(x));
    }
    if (x < static_cast<std::size_t>(initial.v.size()) && std::isfinite(initial.v(x))) {
      r.m_v = std::max(r.m_v, initial.v(x));
    }
  }
  return r;
}

std::vector<double> sample_times(const SampleSchedule& schedule, double t_end) {
  std::vector<double> t{0.0};
  if (schedule.uniform > 0.0) {
    for (std::size_t k = 1;; ++k) {
      const double s = static_cast<double>(k) * schedule.uniform;
      if (s >= t_end) break;
      t.push_back(s);
    }
  } else if (schedule.first > 0.0 && schedule.ratio > 1.0) {
    for (double s = schedule.first; s < t_end; s *= schedule.ratio) t.push_back(s);
  }
  for (double s : schedule.forced) {
    if (s > 0.0 && s < t_end) t.push_back(s);
  }
  t.push_back(t_end);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double s : t) {
    if (out.empty() || s - out.back() > 1e-12 * std::max(1.0, s)) out.push_back(s);
  }
  out.back() = t_end;
  return out;
}

double step_cap(const Problem& problem, const RectangleBounds& bounds) {
  const auto& p = problem.params();
  const double lf = p.a1 + 2.0 * p.b1 * bounds.m_u + p.c1 * bounds.m_v + p.a2 +
                    p.b2 * bounds.m_u + 2.0 * p.c2 * bounds.m_v;
  const double diff =
      std::max(p.d1 * max_weighted_degree(problem.graph(), Species::One, problem.mode()),
               p.d2 * max_weighted_degree(problem.graph(), Species::Two, problem.mode()));
  return 0.5 / (diff + lf);
}

FieldPair prepare_initial(const Problem& problem, const FieldPair& initial) {
  const std::size_t n = problem.size();
  if (static_cast<std::size_t>(initial.u.size()) != n ||
      static_cast<std::size_t>(initial.v.size()) != n) {
    fail(ErrorCode::MissingVertexValue, "initial data must have one entry per vertex");
  }
  FieldPair out{Field::Zero(static_cast<Eigen::Index>(n)),
                Field::Zero(static_cast<Eigen::Index>(n))};
  auto check = [&](const Field& src, Field& dst, const char* label) {
    for (std::size_t x : problem.active()) {
      const double val = src(x);
      const bool on_boundary = problem.has_partition() && problem.partition().is_boundary(x);
      if (std::isnan(val)) {
        if (on_boundary) continue;
        fail(ErrorCode::MissingVertexValue, std::string(label) + " missing at '" +
                                                problem.graph().name(x) + "'");
      }
      if (val < 0.0 || !std::isfinite(val)) {
        fail(ErrorCode::NegativeInitial, std::string(label) + " negative or infinite at '" +
                                             problem.graph().name(x) + "'");
      }
      if (on_boundary && problem.bc() == BoundaryCondition::Dirichlet && val != 0.0) {
        fail(ErrorCode::InvalidInitial, std::string(label) + " must vanish on the boundary at '" +
                                            problem.graph().name(x) + "'");
      }
      dst(x) = val;
    }
  };
  check(initial.u, out.u, "u0");
  check(initial.v, out.v, "v0");
  if (problem.bc() == BoundaryCondition::Neumann) out = neumann_project(problem, out);
  return out;
}

Integrator::Integrator(const Problem& problem, const FieldPair& initial, const StepPolicy& policy)
    : problem_(problem), policy_(policy) {
  state_ = prepare_initial(problem, initial);
  bounds_ = invariant_rectangle(problem, state_);
  const double cap = step_cap(problem, bounds_);
  stats_.dt = policy.dt > 0.0 ? std::min(policy.dt, cap) : cap;
  mask_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.size()));
  for (std::size_t x : problem.evolved()) mask_(x) = 1.0;
}

void Integrator::rhs(const Field& u, const Field& v, Field& du, Field& dv) const {
  const auto& p = problem_.params();
  du.noalias() = problem_.diffusion(Species::One) * u;
  dv.noalias() = problem_.diffusion(Species::Two) * v;
  du.array() += mask_.array() * u.array() * (p.a1 - p.b1 * u.array() - p.c1 * v.array());
  dv.array() += mask_.array() * v.array() * (p.a2 - p.b2 * u.array() - p.c2 * v.array());
  du.array() *= mask_.array();
  dv.array() *= mask_.array();
}

bool Integrator::accept(FieldPair& c) {
  std::size_t clamps = 0;
  auto scan = [&](Field& f, double upper) {
    for (std::size_t x : problem_.active()) {
      double& val = f(x);
      if (!std::isfinite(val) || val < kClampFloor || val > upper + kRectangleSlack) return false;
      if (val < 0.0) {
        val = 0.0;
        ++clamps;
      }
    }
    return true;
  };
  if (!scan(c.u, bounds_.m_u) || !scan(c.v, bounds_.m_v)) return false;
  stats_.clamped += clamps;
  return true;
}

void Integrator::step(double h) {
  const Field& u = state_.u;
  const Field& v = state_.v;
  const auto n = u.size();
  Field k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n);
  rhs(u, v, k1u, k1v);
  rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
  rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
  rhs(u + h * k3u, v + h * k3v, k4u, k4v);
  FieldPair next{u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
                 v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
  if (!accept(next)) {
    const double half = 0.5 * h;
    if (half < policy_.dt_min) {
      fail(ErrorCode::StepSizeUnstable,
           "state left the invariant rectangle at t=" + std::to_string(time_) +
               " with step below " + std::to_string(policy_.dt_min));
    }
    ++stats_.rejected;
    step(half);
    step(half);
    return;
  }
  next.u = problem_.projector(Species::One) * next.u;
  next.v = problem_.projector(Species::Two) * next.v;
  state_ = std::move(next);
  time_ += h;
  ++stats_.steps;
}

void Integrator::advance_to(double t) {
  const double span = t - time_;
  if (span <= 0.0) return;
  const auto count = static_cast<std::size_t>(std::ceil(span / stats_.dt - 1e-9));
  const double h = span / static_cast<double>(std::max<std::size_t>(count, 1));
  const double start = time_;
  for (std::size_t k = 0; k < count; ++k) step(h);
  // Pin the clock to the target so sample times carry no drift.
  time_ = start + span;
}

Trajectory integrate(const Problem& problem, const FieldPair& initial, double t_end,
                     const StepPolicy& policy, const SampleSchedule& schedule) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    fail(ErrorCode::InvalidProblem, "t_end must be positive and finite");
  }
  Integrator marcher(problem, initial, policy);
  Trajectory out;
  out.params = problem.params();
  out.bc = problem.bc();
  out.bounds = marcher.bounds();
  for (double t : sample_times(schedule, t_end)) {
    marcher.advance_to(t);
    out.times.push_back(t);
    out.states.push_back(marcher.state());
  }
  out.stats = marcher.stats();
  return out;
}

}  // namespace lvg
