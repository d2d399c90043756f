#include "lvgraph/classify.hpp"

#include "lvgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lvg {

CoexistencePoint coexistence_point(const CompetitionParams& p) {
  const double tri = p.b1 * p.c2 - p.b2 * p.c1;
  if (tri == 0.0) fail(ErrorCode::DegenerateTriangle, "b1*c2 == b2*c1");
  return {(p.a1 * p.c2 - p.a2 * p.c1) / tri, (p.a2 * p.b1 - p.a1 * p.b2) / tri, tri};
}

std::string_view to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::UWins: return "UWins";
    case RegimeKind::VWins: return "VWins";
    case RegimeKind::Coexist: return "Coexist";
    case RegimeKind::Bistable: return "Bistable";
    case RegimeKind::BothExtinct: return "BothExtinct";
    case RegimeKind::SemiTrivialU: return "SemiTrivialU";
    case RegimeKind::SemiTrivialV: return "SemiTrivialV";
    case RegimeKind::CoexistBounds: return "CoexistBounds";
    case RegimeKind::Unresolved: return "Unresolved";
  }
  return "?";
}

double Regime::margin(std::string_view name) const {
  for (const auto& c : certificates) {
    if (c.name == name) return c.margin;
  }
  fail(ErrorCode::InvalidProblem, "no certificate '" + std::string(name) + "'");
}

double Regime::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : certificates) m = std::min(m, std::abs(c.margin));
  return m;
}

namespace {

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

Regime classify_neumann(const CompetitionParams& p) {
  Regime r;
  const double ratio = p.a1 / p.a2;
  // Positive when a1/a2 exceeds the compared ratio.
  r.certificates = {{"a1/a2-b1/b2", ratio - p.b1 / p.b2}, {"a1/a2-c1/c2", ratio - p.c1 / p.c2}};
  const int vs_b = sign(p.a1 * p.b2 - p.a2 * p.b1);
  const int vs_c = sign(p.a1 * p.c2 - p.a2 * p.c1);
  if (vs_b == 0 || vs_c == 0) {
    r.kind = RegimeKind::Unresolved;
  } else if (vs_b < 0 && vs_c < 0) {
    r.kind = RegimeKind::VWins;
    r.constant_limit = {0.0, p.a2 / p.c2};
  } else if (vs_b > 0 && vs_c > 0) {
    r.kind = RegimeKind::UWins;
    r.constant_limit = {p.a1 / p.b1, 0.0};
  } else if (vs_c > 0) {
    r.kind = RegimeKind::Coexist;
    const CoexistencePoint c = coexistence_point(p);
    r.constant_limit = {c.xi, c.eta};
  } else {
    r.kind = RegimeKind::Bistable;
  }
  return r;
}

Regime classify_bistable_basin(const CompetitionParams& p, const FieldPair& initial,
                               const std::vector<std::size_t>& active) {
  if (classify_neumann(p).kind != RegimeKind::Bistable) {
    fail(ErrorCode::RegimeMismatch, "parameters are not in the bistable regime");
  }
  const CoexistencePoint c = coexistence_point(p);
  const double cap_u = p.a1 / p.b1;
  const double cap_v = p.a2 / p.c2;
  double u_box = std::numeric_limits<double>::infinity();  // xi < u0 < a1/b1, 0 < v0 < eta
  double v_box = std::numeric_limits<double>::infinity();  // 0 < u0 < xi, eta < v0 < a2/c2
  for (std::size_t x : active) {
    const double u = initial.u(x);
    const double v = initial.v(x);
    u_box = std::min({u_box, u - c.xi, cap_u - u, v, c.eta - v});
    v_box = std::min({v_box, u, c.xi - u, v - c.eta, cap_v - v});
  }
  Regime r;
  r.certificates = {{"u-basin", u_box}, {"v-basin", v_box}};
  if (u_box > 0.0) {
    r.kind = RegimeKind::UWins;
    r.constant_limit = {cap_u, 0.0};
  } else if (v_box > 0.0) {
    r.kind = RegimeKind::VWins;
    r.constant_limit = {0.0, cap_v};
  } else {
    r.kind = RegimeKind::Unresolved;
  }
  return r;
}

Regime classify_dirichlet(const CompetitionParams& p, const EigenPair& eig1, const EigenPair& eig2,
                          std::optional<CoexistenceBounds> bounds) {
  const double excess_u = p.a1 - eig1.lambda0 * p.d1;
  const double excess_v = p.a2 - eig2.lambda0 * p.d2;
  Regime r;
  r.certificates = {{"a1-lambda1*d1", excess_u}, {"a2-lambda2*d2", excess_v}};
  const bool u_lives = excess_u > 0.0;
  const bool v_lives = excess_v > 0.0;
  if (!u_lives && !v_lives) {
    r.kind = RegimeKind::BothExtinct;
    r.constant_limit = {0.0, 0.0};
  } else if (u_lives && !v_lives) {
    r.kind = RegimeKind::SemiTrivialU;
  } else if (!u_lives && v_lives) {
    r.kind = RegimeKind::SemiTrivialV;
  } else {
    const double k_u = excess_u - p.c1 / p.c2 * p.a2;
    const double k_v = excess_v - p.b2 / p.b1 * p.a1;
    r.certificates.push_back({"coexist-u", k_u});
    r.certificates.push_back({"coexist-v", k_v});
    if (k_u > 0.0 && k_v > 0.0) {
      r.kind = RegimeKind::CoexistBounds;
      r.bounds = std::move(bounds);
    } else {
      r.kind = RegimeKind::Unresolved;
    }
  }
  return r;
}

PredictedLimit predicted_limit(const Regime& regime, const Problem& problem) {
  PredictedLimit out;
  out.kind = regime.kind;
  const std::size_t n = problem.size();
  const auto zero = Field::Zero(static_cast<Eigen::Index>(n));
  switch (regime.kind) {
    case RegimeKind::Unresolved:
    case RegimeKind::Bistable:
      fail(ErrorCode::InvalidProblem,
           std::string("no single limit for regime ") + std::string(to_string(regime.kind)));
    case RegimeKind::CoexistBounds:
      if (!regime.bounds) {
        fail(ErrorCode::RequiresSteadySolve, "coexistence bounds were not computed");
      }
      out.bounds = regime.bounds;
      return out;
    case RegimeKind::SemiTrivialU:
    case RegimeKind::SemiTrivialV: {
      if (problem.bc() != BoundaryCondition::Dirichlet) {
        fail(ErrorCode::RequiresSteadySolve, "semitrivial profile needs a Dirichlet problem");
      }
      const auto& p = problem.params();
      const bool u_side = regime.kind == RegimeKind::SemiTrivialU;
      const SteadyState s =
          u_side ? logistic_steady_state(problem.graph(), problem.partition(), Species::One, p.d1,
                                         p.a1, p.b1)
                 : logistic_steady_state(problem.graph(), problem.partition(), Species::Two, p.d2,
                                         p.a2, p.c2);
      out.state = u_side ? FieldPair{s.values, zero} : FieldPair{zero, s.values};
      return out;
    }
    default:
      break;
  }
  if (!regime.constant_limit) {
    fail(ErrorCode::RequiresSteadySolve, "regime carries no limit");
  }
  FieldPair f{zero, zero};
  for (std::size_t x : problem.active()) {
    f.u(x) = regime.constant_limit->first;
    f.v(x) = regime.constant_limit->second;
  }
  // Dirichlet boundary values are pinned at 0 whatever the interior limit.
  if (problem.bc() == BoundaryCondition::Dirichlet) {
    for (std::size_t z : problem.partition().boundary()) {
      f.u(z) = 0.0;
      f.v(z) = 0.0;
    }
  }
  out.state = f;
  return out;
}

double sup_distance(const Problem& problem, const FieldPair& state, const FieldPair& limit) {
  double d = 0.0;
  for (std::size_t x : problem.active()) {
    d = std::max({d, std::abs(state.u(x) - limit.u(x)), std::abs(state.v(x) - limit.v(x))});
  }
  return d;
}

}  // namespace lvg
