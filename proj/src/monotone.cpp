#include "lvgraph/monotone.hpp"

#include "lvgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lvg {

namespace {

constexpr double kOrderTol = 1e-12;

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << " " << value;
  return os.str();
}

double min_over(const Field& f, const std::vector<std::size_t>& where) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t x : where) m = std::min(m, f(x));
  return m;
}

double max_over(const Field& f, const std::vector<std::size_t>& where) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t x : where) m = std::max(m, f(x));
  return m;
}

Field constant_on(std::size_t n, const std::vector<std::size_t>& where, double value) {
  Field f = Field::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t x : where) f(x) = value;
  return f;
}

void track(SlackEntry& e, double slack, double t, std::size_t x) {
  if (slack < e.worst) {
    e.worst = slack;
    e.at_time = t;
    e.at_vertex = x;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

MaximumPrincipleVerdict maximum_principle_check(const LinearCoupledSystem& system,
                                                const std::vector<CoupledSample>& samples,
                                                double premise_tol, double verdict_tol) {
  if (system.graph == nullptr || system.components.empty() || !system.coupling) {
    fail(ErrorCode::InvalidProblem, "linear system needs a graph, components and a coupling");
  }
  if (samples.empty()) fail(ErrorCode::InvalidProblem, "no samples");
  const auto& g = *system.graph;
  const std::size_t n = g.size();
  const std::size_t m = system.size();

  std::vector<std::vector<std::size_t>> evaluated(m), support(m);
  for (std::size_t k = 0; k < m; ++k) {
    evaluated[k] = system.components[k].mode.evaluated(n);
    support[k] = system.components[k].mode.support(n);
  }

  MaximumPrincipleVerdict out;
  double prev_t = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& smp = samples[s];
    if (smp.values.size() != m || smp.rates.size() != m || !(smp.t > prev_t)) {
      fail(ErrorCode::InvalidProblem, "sample " + std::to_string(s) + " is malformed");
    }
    prev_t = smp.t;

    std::vector<Eigen::MatrixXd> h(n);
    for (std::size_t x = 0; x < n; ++x) {
      h[x] = system.coupling(x, smp.t);
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) {
          if (k != l && h[x](k, l) > 0.0) {
            fail(ErrorCode::HypothesisNotMet,
                 "positive off-diagonal coupling at vertex " + g.name(x));
          }
        }
      }
    }

    for (std::size_t k = 0; k < m; ++k) {
      const auto& comp = system.components[k];
      const Field lap = laplacian_apply(g, comp.species, comp.mode, smp.values[k]);
      for (std::size_t x : evaluated[k]) {
        double lhs = smp.rates[k](x) - comp.diffusion * lap(x);
        for (std::size_t l = 0; l < m; ++l) lhs += h[x](k, l) * smp.values[l](x);
        out.worst_premise = std::max(out.worst_premise, lhs);
        if (lhs > premise_tol) {
          fail(ErrorCode::HypothesisNotMet,
               describe("differential inequality violated by", lhs) + " at t=" +
                   std::to_string(smp.t) + ", vertex " + g.name(x));
        }
      }
      if (!comp.mode.is_whole_graph() && comp.bc != BoundaryCondition::NoBoundary) {
        const auto& part = comp.mode.partition();
        for (std::size_t z : part.boundary()) {
          const double b = comp.bc == BoundaryCondition::Dirichlet
                               ? smp.values[k](z)
                               : normal_derivative(g, comp.species, part, smp.values[k], z);
          out.worst_premise = std::max(out.worst_premise, b);
          if (b > premise_tol) {
            fail(ErrorCode::HypothesisNotMet,
                 describe("boundary inequality violated by", b) + " at vertex " + g.name(z));
          }
        }
      }
      if (s == 0) {
        const double first = max_over(smp.values[k], support[k]);
        if (first > premise_tol) {
          fail(ErrorCode::HypothesisNotMet, describe("initial value is positive:", first));
        }
      }
      out.max_value = std::max(out.max_value, max_over(smp.values[k], support[k]));
    }
  }
  out.nonpositive = out.max_value <= verdict_tol;
  return out;
}

// ---------------------------------------------------------------------------

OrderedPair constant_pair(const FieldPair& upper, const FieldPair& lower, double t0, double t1) {
  const FieldPair zero{Field::Zero(upper.u.size()), Field::Zero(upper.v.size())};
  OrderedPair p;
  p.upper = [upper](double) { return upper; };
  p.lower = [lower](double) { return lower; };
  p.upper_rate = [zero](double) { return zero; };
  p.lower_rate = [zero](double) { return zero; };
  p.t0 = t0;
  p.t1 = t1;
  return p;
}

double PairReport::worst() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) w = std::min(w, e.worst);
  return w;
}

const SlackEntry& PairReport::entry(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  fail(ErrorCode::InvalidProblem, "report has no entry '" + name + "'");
}

PairReport verify_coupled_pair(const Problem& problem, const OrderedPair& pair,
                               const std::vector<double>& grid, const FieldPair* initial,
                               double pass_tol) {
  const auto& g = problem.graph();
  const auto& p = problem.params();
  const auto& mode = problem.mode();
  SlackEntry upper_u{"upper-u"}, lower_u{"lower-u"}, upper_v{"upper-v"}, lower_v{"lower-v"};
  SlackEntry order_u{"order-u"}, order_v{"order-v"};
  SlackEntry bound_u{"boundary-u"}, bound_v{"boundary-v"};

  for (double t : grid) {
    const FieldPair hi = pair.upper(t);
    const FieldPair lo = pair.lower(t);
    const FieldPair hi_rate = pair.upper_rate(t);
    const FieldPair lo_rate = pair.lower_rate(t);
    const Field lap_hi_u = laplacian_apply(g, Species::One, mode, hi.u);
    const Field lap_lo_u = laplacian_apply(g, Species::One, mode, lo.u);
    const Field lap_hi_v = laplacian_apply(g, Species::Two, mode, hi.v);
    const Field lap_lo_v = laplacian_apply(g, Species::Two, mode, lo.v);
    for (std::size_t x : problem.evolved()) {
      const double f1_hi = reaction(p, hi.u(x), lo.v(x)).f1;
      const double f1_lo = reaction(p, lo.u(x), hi.v(x)).f1;
      const double f2_hi = reaction(p, lo.u(x), hi.v(x)).f2;
      const double f2_lo = reaction(p, hi.u(x), lo.v(x)).f2;
      track(upper_u, hi_rate.u(x) - p.d1 * lap_hi_u(x) - f1_hi, t, x);
      track(lower_u, -(lo_rate.u(x) - p.d1 * lap_lo_u(x) - f1_lo), t, x);
      track(upper_v, hi_rate.v(x) - p.d2 * lap_hi_v(x) - f2_hi, t, x);
      track(lower_v, -(lo_rate.v(x) - p.d2 * lap_lo_v(x) - f2_lo), t, x);
    }
    for (std::size_t x : problem.active()) {
      track(order_u, hi.u(x) - lo.u(x), t, x);
      track(order_v, hi.v(x) - lo.v(x), t, x);
    }
    if (problem.has_partition()) {
      const auto& part = problem.partition();
      const bool dirichlet = problem.bc() == BoundaryCondition::Dirichlet;
      for (std::size_t z : part.boundary()) {
        auto b = [&](const Field& f, Species s) {
          return dirichlet ? f(z) : normal_derivative(g, s, part, f, z);
        };
        track(bound_u, std::min(b(hi.u, Species::One), -b(lo.u, Species::One)), t, z);
        track(bound_v, std::min(b(hi.v, Species::Two), -b(lo.v, Species::Two)), t, z);
      }
    }
  }

  PairReport report;
  report.entries = {upper_u, lower_u, upper_v, lower_v, order_u, order_v};
  if (problem.has_partition()) {
    report.entries.push_back(bound_u);
    report.entries.push_back(bound_v);
  }
  if (initial != nullptr) {
    SlackEntry init{"initial"};
    const FieldPair hi = pair.upper(pair.t0);
    const FieldPair lo = pair.lower(pair.t0);
    for (std::size_t x : problem.active()) {
      track(init, hi.u(x) - initial->u(x), pair.t0, x);
      track(init, initial->u(x) - lo.u(x), pair.t0, x);
      track(init, hi.v(x) - initial->v(x), pair.t0, x);
      track(init, initial->v(x) - lo.v(x), pair.t0, x);
    }
    report.entries.push_back(init);
  }
  report.passed = report.worst() >= -pass_tol;
  return report;
}

// ---------------------------------------------------------------------------

double envelope_epsilon_cap(EnvelopeRegime regime, const CompetitionParams& p) {
  bool holds = false;
  double cap = 0.0;
  switch (regime) {
    case EnvelopeRegime::VWins:
      holds = p.a1 * p.b2 < p.a2 * p.b1 && p.a1 * p.c2 < p.a2 * p.c1;
      cap = std::min(p.c1 * p.a2 / p.c2 - p.a1, p.b1 * p.a2 / p.b2 - p.a1);
      break;
    case EnvelopeRegime::UWins:
      holds = p.a1 * p.b2 > p.a2 * p.b1 && p.a1 * p.c2 > p.a2 * p.c1;
      cap = std::min(p.a1 * p.c2 / p.c1 - p.a2, p.a1 * p.b2 / p.b1 - p.a2);
      break;
    case EnvelopeRegime::Coexist:
      holds = p.a2 * p.c1 < p.a1 * p.c2 && p.a1 * p.b2 < p.a2 * p.b1;
      cap = std::min(p.c2 * p.a1 / p.c1 - p.a2, p.b1 * p.a2 / p.b2 - p.a1);
      break;
  }
  if (!holds || !(cap > 0.0)) {
    fail(ErrorCode::RegimeMismatch, "parameters do not satisfy the regime's strict inequalities");
  }
  return cap;
}

Envelope analytic_envelopes(EnvelopeRegime regime, const Problem& problem,
                            std::optional<double> epsilon, double t0,
                            const FieldPair& state_at_t0) {
  const auto& p = problem.params();
  const double cap = envelope_epsilon_cap(regime, p);
  const double eps = epsilon.value_or(0.5 * cap);
  if (!(eps > 0.0) || !(eps < cap)) {
    fail(ErrorCode::EpsilonTooLarge,
         describe("epsilon must lie in (0, cap); cap is", cap) + describe(", got", eps));
  }
  const auto& active = problem.active();
  const double min_u = min_over(state_at_t0.u, active);
  const double min_v = min_over(state_at_t0.v, active);
  const double max_u = max_over(state_at_t0.u, active);
  const double max_v = max_over(state_at_t0.v, active);
  if (!(max_u < (p.a1 + eps) / p.b1) || !(max_v < (p.a2 + eps) / p.c2)) {
    fail(ErrorCode::StateOutsideEnvelope,
         "state at t0 is not below ((a1+eps)/b1, (a2+eps)/c2); start later");
  }

  EnvelopeConstants k;
  k.epsilon = eps;
  Envelope env;
  double sigma_bound = 0.0;
  switch (regime) {
    case EnvelopeRegime::VWins:
      sigma_bound = std::min({p.a2 - p.c2 / p.c1 * (p.a1 + eps), p.a2 - p.b2 / p.b1 * (p.a1 + eps),
                              p.b1 * min_u, p.c2 * min_v});
      break;
    case EnvelopeRegime::UWins:
      sigma_bound = std::min({p.a1 - p.c1 / p.c2 * (p.a2 + eps), p.a1 - p.b1 / p.b2 * (p.a2 + eps),
                              p.c2 * min_v, p.b1 * min_u});
      break;
    case EnvelopeRegime::Coexist: {
      const double tri = p.b1 * p.c2 - p.b2 * p.c1;
      const double xi = (p.a1 * p.c2 - p.a2 * p.c1) / tri;
      const double eta = (p.a2 * p.b1 - p.a1 * p.b2) / tri;
      sigma_bound = std::min({p.b1 * xi, p.c2 * eta, p.c2 * min_v,
                              p.a2 - p.b2 / p.b1 * (p.a1 + eps), p.a1 - p.c1 / p.c2 * (p.a2 + eps),
                              p.b1 * min_u});
      break;
    }
  }
  if (!(sigma_bound > 0.0)) {
    fail(ErrorCode::NoAdmissibleSigma, describe("sigma bound is not positive:", sigma_bound));
  }
  const double sigma = 0.5 * sigma_bound;
  k.sigma = sigma;

  const std::size_t n = problem.size();
  // Each envelope component is c + a * exp(-r (t - t0)); the rate follows.
  struct Term {
    double c, a, r;
    double value(double tau) const { return c + a * std::exp(-r * tau); }
    double rate(double tau) const { return -r * a * std::exp(-r * tau); }
  };
  Term uh{}, ul{}, vh{}, vl{};
  switch (regime) {
    case EnvelopeRegime::VWins: {
      const double gap = p.a2 - sigma - p.b2 / p.b1 * (p.a1 + eps);
      k.beta = 0.5 * std::min({p.c1 * sigma / p.c2 + eps, sigma * gap / (p.a2 - sigma), p.a2});
      k.q = p.c1 / p.c2 * (p.a2 + eps) + sigma - p.a1;
      uh = {0.0, (p.a1 + eps) / p.b1, k.beta};
      ul = {0.0, sigma / p.b1, k.q};
      vh = {p.a2 / p.c2, eps / p.c2, k.beta};
      vl = {p.a2 / p.c2, -(p.a2 - sigma) / p.c2, k.beta};
      env.limit_u = 0.0;
      env.limit_v = p.a2 / p.c2;
      break;
    }
    case EnvelopeRegime::UWins: {
      const double gap = p.a1 - sigma - p.c1 / p.c2 * (p.a2 + eps);
      k.beta = 0.5 * std::min(p.b2 * sigma / p.b1 + eps, sigma * gap / (p.a1 - sigma));
      k.q = sigma + p.b2 / p.b1 * (p.a1 + eps) - p.a2;
      uh = {p.a1 / p.b1, eps / p.b1, p.a1};
      ul = {p.a1 / p.b1, -(p.a1 - sigma) / p.b1, k.beta};
      vh = {0.0, (p.a2 + eps) / p.c2, k.beta};
      vl = {0.0, sigma / p.c2, k.q};
      env.limit_u = p.a1 / p.b1;
      env.limit_v = 0.0;
      break;
    }
    case EnvelopeRegime::Coexist: {
      const double tri = p.b1 * p.c2 - p.b2 * p.c1;
      const double bx = p.b1 * (p.a1 * p.c2 - p.a2 * p.c1) / tri;  // b1 xi
      const double ce = p.c2 * (p.a2 * p.b1 - p.a1 * p.b2) / tri;  // c2 eta
      const double q1 = sigma * (p.a2 - sigma - p.b2 / p.b1 * (p.a1 + eps)) / (ce - sigma);
      const double q2 = bx * (p.c1 / p.c2 * sigma + eps) / (p.a1 + eps - bx);
      const double q3 = sigma * (p.a1 - sigma - p.c1 / p.c2 * (p.a2 + eps)) / (bx - sigma);
      const double q4 = ce * (p.b2 / p.b1 * sigma + eps) / (p.a2 + eps - ce);
      k.q = 0.5 * std::min({q1, q2, q3, q4});
      uh = {bx / p.b1, (p.a1 + eps - bx) / p.b1, k.q};
      ul = {bx / p.b1, -(bx - sigma) / p.b1, k.q};
      vh = {ce / p.c2, (p.a2 + eps - ce) / p.c2, k.q};
      vl = {ce / p.c2, -(ce - sigma) / p.c2, k.q};
      env.limit_u = bx / p.b1;
      env.limit_v = ce / p.c2;
      break;
    }
  }
  env.constants = k;

  auto make = [n, active, t0](Term a, Term b, bool rate) {
    return [=](double t) {
      const double tau = t - t0;
      const double x = rate ? a.rate(tau) : a.value(tau);
      const double y = rate ? b.rate(tau) : b.value(tau);
      return FieldPair{constant_on(n, active, x), constant_on(n, active, y)};
    };
  };
  env.pair.upper = make(uh, vh, false);
  env.pair.lower = make(ul, vl, false);
  env.pair.upper_rate = make(uh, vh, true);
  env.pair.lower_rate = make(ul, vl, true);
  env.pair.t0 = t0;
  return env;
}

// ---------------------------------------------------------------------------

double logistic_residual(const WeightedGraph& graph, const DomainPartition& partition,
                         Species species, double d, double a, double E, const Field& s) {
  const Field lap = laplacian_apply(graph, species, DomainMode::subgraph(partition), s);
  double r = 0.0;
  for (std::size_t x : partition.interior()) {
    r = std::max(r, std::abs(-d * lap(x) - s(x) * (a - E * s(x))));
  }
  return r;
}

SteadyState logistic_steady_state(const WeightedGraph& graph, const DomainPartition& partition,
                                  Species species, double d, double a, double E, double tol) {
  for (double val : {d, a, E, tol}) {
    if (!(val > 0.0) || !std::isfinite(val)) {
      fail(ErrorCode::InvalidParams, "d, a, E and tol must be positive");
    }
  }
  const EigenPair eig = smallest_dirichlet_eigenpair(graph, species, partition);
  if (a <= eig.lambda0 * d) {
    fail(ErrorCode::NoPositiveState,
         describe("growth does not exceed the threshold lambda0*d =", eig.lambda0 * d));
  }
  const auto& in = partition.interior();
  const auto k = static_cast<Eigen::Index>(in.size());
  const Eigen::MatrixXd A = dirichlet_operator(graph, species, partition);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(d * A + a * Eigen::MatrixXd::Identity(k, k));

  Eigen::VectorXd phi(k);
  for (Eigen::Index i = 0; i < k; ++i) phi(i) = eig.phi(in[i]);
  const double delta = 0.5 * (a - eig.lambda0 * d) / E;
  Eigen::VectorXd lo = delta * phi;
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(k, a / E);

  auto next = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    const Eigen::VectorXd rhs = (w.array() * (a - E * w.array()) + a * w.array()).matrix();
    return lu.solve(rhs);
  };
  auto expand = [&](const Eigen::VectorXd& w) {
    Field f = Field::Zero(static_cast<Eigen::Index>(graph.size()));
    for (Eigen::Index i = 0; i < k; ++i) f(in[i]) = w(i);
    return f;
  };

  SteadyState out;
  constexpr int max_iters = 1000000;
  double last_gap = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::VectorXd lo2 = next(lo);
    Eigen::VectorXd hi2 = next(hi);
    const double viol = std::max({(lo - lo2).maxCoeff(), (lo2 - hi2).maxCoeff(),
                                  (hi2 - hi).maxCoeff(), 0.0});
    out.max_order_violation = std::max(out.max_order_violation, viol);
    if (viol > kOrderTol) {
      fail(ErrorCode::NoConvergence,
           describe("monotone order breached by", viol) + " at iteration " + std::to_string(it));
    }
    lo = std::move(lo2);
    hi = std::move(hi2);
    const double gap = (hi - lo).maxCoeff();
    if (gap <= tol) {
      Field best;
      double best_res = std::numeric_limits<double>::infinity();
      for (const Eigen::VectorXd& cand :
           {Eigen::VectorXd(lo), Eigen::VectorXd(hi), Eigen::VectorXd(0.5 * (lo + hi))}) {
        const Field f = expand(cand);
        const double r = logistic_residual(graph, partition, species, d, a, E, f);
        if (r < best_res) {
          best_res = r;
          best = f;
        }
      }
      if (best_res <= tol) {
        out.values = best;
        out.residual = best_res;
        out.iterations = it;
        return out;
      }
    }
    stalled = gap >= last_gap ? stalled + 1 : 0;
    last_gap = gap;
    if (stalled > 50) break;
  }
  fail(ErrorCode::NoConvergence, "logistic iteration did not reach the tolerance");
}

// ---------------------------------------------------------------------------

namespace {

bool identical_on_closure(const WeightedGraph& g, const DomainPartition& part) {
  for (std::size_t x : part.closure()) {
    if (g.measure(Species::One, x) != g.measure(Species::Two, x)) return false;
    for (std::size_t y : part.closure()) {
      if (g.weight(Species::One, x, y) != g.weight(Species::Two, x, y)) return false;
    }
  }
  return true;
}

}  // namespace

CoexistenceBounds coexistence_bounds(const Problem& problem, std::optional<double> epsilon,
                                     std::optional<double> delta, double tol) {
  if (problem.bc() != BoundaryCondition::Dirichlet) {
    fail(ErrorCode::InvalidProblem, "coexistence bounds need a Dirichlet problem");
  }
  if (!(tol > 0.0)) fail(ErrorCode::InvalidProblem, "tolerance must be positive");
  const auto& g = problem.graph();
  const auto& part = problem.partition();
  const auto& p = problem.params();
  const EigenPair e1 = smallest_dirichlet_eigenpair(g, Species::One, part);
  const EigenPair e2 = smallest_dirichlet_eigenpair(g, Species::Two, part);

  CoexistenceBounds out;
  out.lambda1 = e1.lambda0;
  out.lambda2 = e2.lambda0;
  const double excess_u = p.a1 - e1.lambda0 * p.d1;
  const double excess_v = p.a2 - e2.lambda0 * p.d2;
  out.margin_u = excess_u - p.c1 / p.c2 * p.a2;
  out.margin_v = excess_v - p.b2 / p.b1 * p.a1;
  if (!(out.margin_u > 0.0) || !(out.margin_v > 0.0)) {
    fail(ErrorCode::ConditionK1Violated,
         describe("margins must be positive; got", out.margin_u) + describe(" and", out.margin_v));
  }

  const double cap = std::min(p.b1 * excess_v / (p.a1 * p.b2) - 1.0,
                              p.c2 * excess_u / (p.a2 * p.c1) - 1.0);
  out.epsilon = epsilon.value_or(0.5 * cap);
  if (!(out.epsilon > 0.0) || !(out.epsilon < cap)) {
    fail(ErrorCode::EpsilonTooLarge, describe("epsilon must lie in (0, cap); cap is", cap));
  }
  const double E = (excess_v - (1.0 + out.epsilon) * p.a1 / p.b1 * p.b2) / p.c2;
  const double F = (excess_u - (1.0 + out.epsilon) * p.a2 / p.c2 * p.c1) / p.b1;
  const double room = std::min(E, F);
  out.delta = delta.value_or(0.5 * room);
  const double phi_max = std::max(e1.phi.maxCoeff(), e2.phi.maxCoeff());
  if (!(out.delta > 0.0) || out.delta * phi_max > room) {
    fail(ErrorCode::DeltaTooLarge, describe("delta * max phi must not exceed", room));
  }

  const double steady_tol = std::min(1e-12, 0.01 * tol);
  const SteadyState s1 = logistic_steady_state(g, part, Species::One, p.d1, p.a1, p.b1, steady_tol);
  const SteadyState s2 = logistic_steady_state(g, part, Species::Two, p.d2, p.a2, p.c2, steady_tol);

  // March A: u from above, v from below. March B: the reverse.
  Integrator march_a(problem, FieldPair{(1.0 + out.epsilon) * s1.values, out.delta * e2.phi});
  Integrator march_b(problem, FieldPair{out.delta * e1.phi, (1.0 + out.epsilon) * s2.values});

  constexpr double spacing = 0.25;
  constexpr int per_window = 4;
  constexpr double max_time = 1e5;
  const double target = 0.1 * tol;
  FieldPair prev_a = march_a.state(), prev_b = march_b.state();
  FieldPair window_a = prev_a, window_b = prev_b;
  const auto& active = problem.active();
  for (long step = 1;; ++step) {
    const double t = spacing * static_cast<double>(step);
    if (t > max_time) fail(ErrorCode::NoConvergence, "ordered marches did not settle");
    march_a.advance_to(t);
    march_b.advance_to(t);
    const FieldPair& a = march_a.state();
    const FieldPair& b = march_b.state();
    double viol = 0.0;
    for (std::size_t x : active) {
      viol = std::max({viol, a.u(x) - prev_a.u(x), prev_a.v(x) - a.v(x), prev_b.u(x) - b.u(x),
                       b.v(x) - prev_b.v(x)});
    }
    out.max_monotone_violation = std::max(out.max_monotone_violation, viol);
    if (viol > kOrderTol) {
      fail(ErrorCode::NoConvergence,
           describe("ordered march lost monotonicity by", viol) + " at t=" + std::to_string(t));
    }
    prev_a = a;
    prev_b = b;
    if (step % per_window == 0) {
      const double change = std::max({(a.u - window_a.u).cwiseAbs().maxCoeff(),
                                      (a.v - window_a.v).cwiseAbs().maxCoeff(),
                                      (b.u - window_b.u).cwiseAbs().maxCoeff(),
                                      (b.v - window_b.v).cwiseAbs().maxCoeff()});
      window_a = a;
      window_b = b;
      if (change < target) {
        out.march_time = t;
        break;
      }
    }
  }

  out.s_upper = march_a.state().u;
  out.r_lower = march_a.state().v;
  out.s_lower = march_b.state().u;
  out.r_upper = march_b.state().v;
  for (std::size_t x : part.interior()) {
    if (out.s_lower(x) > out.s_upper(x) + tol || out.r_lower(x) > out.r_upper(x) + tol) {
      fail(ErrorCode::NoConvergence, "march limits are not ordered at '" + g.name(x) + "'");
    }
  }

  bool strong = identical_on_closure(g, part);
  for (std::size_t x : part.interior()) {
    strong = strong && 2.0 * p.b1 * out.s_lower(x) > excess_u &&
             2.0 * p.c2 * out.r_lower(x) > excess_v;
  }
  if (strong) {
    out.uniqueness_checked = true;
    const double gap = std::max((out.s_upper - out.s_lower).cwiseAbs().maxCoeff(),
                                (out.r_upper - out.r_lower).cwiseAbs().maxCoeff());
    if (gap > 10.0 * tol) {
      fail(ErrorCode::NoConvergence, describe("uniqueness predicted but limits differ by", gap));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double default_lipschitz(const CompetitionParams& p, const RectangleBounds& b) {
  return std::max(p.a1 + 2.0 * p.b1 * b.m_u + p.c1 * b.m_v, p.a2 + p.b2 * b.m_u + 2.0 * p.c2 * b.m_v);
}

std::vector<double> uniform_grid(double t0, double t1, double h) {
  if (!(t1 > t0) || !(h > 0.0)) fail(ErrorCode::InvalidProblem, "empty grid");
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-9));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
  }
  g.back() = t1;
  return g;
}

std::vector<double> graded_grid(double t0, double t1, double h_min, double h_max, double growth) {
  if (!(t1 > t0) || !(h_min > 0.0) || !(h_max >= h_min) || !(growth >= 1.0)) {
    fail(ErrorCode::InvalidProblem, "bad graded grid parameters");
  }
  std::vector<double> g{t0};
  double h = h_min;
  while (g.back() + h < t1 - 0.5 * h_min) {
    g.push_back(g.back() + h);
    h = std::min(h * growth, h_max);
  }
  g.push_back(t1);
  return g;
}

MonotoneSolution monotone_solve(const Problem& problem, const OrderedPair& pair,
                                const FieldPair& initial, const std::vector<double>& grid,
                                double lipschitz, double tol, int max_iterations) {
  if (grid.size() < 2) fail(ErrorCode::PairInvalid, "grid needs at least two instants");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) fail(ErrorCode::PairInvalid, "grid must be increasing");
  }
  if (grid.front() < pair.t0 || grid.back() > pair.t1) {
    fail(ErrorCode::PairInvalid, "grid leaves the pair's horizon");
  }
  const FieldPair start = prepare_initial(problem, initial);
  const PairReport report = verify_coupled_pair(problem, pair, grid, &start);
  if (!report.passed) {
    std::string worst;
    for (const auto& e : report.entries) {
      if (e.worst < -1e-9) worst += " " + e.name + describe("", e.worst);
    }
    fail(ErrorCode::PairInvalid, "not a coupled upper/lower pair:" + worst);
  }

  const auto& p = problem.params();
  const std::size_t N = grid.size();
  const auto& ev = problem.evolved();
  const auto k = static_cast<Eigen::Index>(ev.size());
  const std::size_t n = problem.size();

  double M = lipschitz;
  if (!(M > 0.0)) {
    RectangleBounds b;
    for (double t : grid) {
      const FieldPair hi = pair.upper(t);
      b.m_u = std::max(b.m_u, max_over(hi.u, problem.active()));
      b.m_v = std::max(b.m_v, max_over(hi.v, problem.active()));
    }
    M = default_lipschitz(p, b);
  }

  // Linear operators on the evolved set, boundary condition folded in.
  std::array<Eigen::MatrixXd, 2> A;
  for (Species s : {Species::One, Species::Two}) {
    const Eigen::MatrixXd& D = problem.diffusion(s);
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) a(i, j) = D(ev[i], ev[j]);
    }
    a -= M * Eigen::MatrixXd::Identity(k, k);
    A[slot(s)] = a;
    const double stiff = (-a.diagonal()).maxCoeff();
    for (std::size_t i = 1; i < N; ++i) {
      if ((grid[i] - grid[i - 1]) * stiff > 2.0 + 1e-12) {
        fail(ErrorCode::PairInvalid, "grid step too large for an order-preserving sweep");
      }
    }
  }

  using Series = std::vector<Eigen::VectorXd>;
  auto restrict = [&](const Field& f) {
    Eigen::VectorXd r(k);
    for (Eigen::Index i = 0; i < k; ++i) r(i) = f(ev[i]);
    return r;
  };
  Series uh(N), ul(N), vh(N), vl(N);
  for (std::size_t i = 0; i < N; ++i) {
    const FieldPair hi = pair.upper(grid[i]);
    const FieldPair lo = pair.lower(grid[i]);
    uh[i] = restrict(hi.u);
    vh[i] = restrict(hi.v);
    ul[i] = restrict(lo.u);
    vl[i] = restrict(lo.v);
  }
  const Eigen::VectorXd u0 = restrict(start.u);
  const Eigen::VectorXd v0 = restrict(start.v);

  // Factorizations are reused across runs of equal steps.
  struct Stepper {
    double h = -1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd explicit_part;
  };
  std::array<Stepper, 2> cache;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
  auto stepper = [&](Species s, double h) -> Stepper& {
    Stepper& st = cache[slot(s)];
    if (st.h != h) {
      st.h = h;
      st.lu.compute(I - 0.5 * h * A[slot(s)]);
      st.explicit_part = I + 0.5 * h * A[slot(s)];
    }
    return st;
  };

  // One linear sweep; `forcing(i)` = f(frozen iterate at i) + M * self at i.
  auto sweep = [&](Species s, const Eigen::VectorXd& w0, auto&& forcing) {
    Series w(N);
    w[0] = w0;
    Eigen::VectorXd f_prev = forcing(0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
      const double h = grid[i + 1] - grid[i];
      Eigen::VectorXd f_next = forcing(i + 1);
      Stepper& st = stepper(s, h);
      w[i + 1] = st.lu.solve(st.explicit_part * w[i] + 0.5 * h * (f_prev + f_next));
      f_prev = std::move(f_next);
    }
    return w;
  };
  auto f1 = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& self) {
    return (u.array() * (p.a1 - p.b1 * u.array() - p.c1 * v.array()) + M * self.array()).matrix();
  };
  auto f2 = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& self) {
    return (v.array() * (p.a2 - p.b2 * u.array() - p.c2 * v.array()) + M * self.array()).matrix();
  };

  MonotoneSolution out;
  auto gap_of = [&] {
    double gap = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      gap = std::max({gap, (uh[i] - ul[i]).maxCoeff(), (vh[i] - vl[i]).maxCoeff()});
    }
    return gap;
  };
  double gap = gap_of();
  int it = 0;
  // At least one sweep, so a pair that already coincides is still checked.
  do {
    if (it == max_iterations) {
      fail(ErrorCode::NoConvergence, describe("monotone sweeps stalled with gap", gap));
    }
    ++it;
    Series uh2 = sweep(Species::One, u0, [&](std::size_t i) { return f1(uh[i], vl[i], uh[i]); });
    Series ul2 = sweep(Species::One, u0, [&](std::size_t i) { return f1(ul[i], vh[i], ul[i]); });
    Series vh2 = sweep(Species::Two, v0, [&](std::size_t i) { return f2(ul[i], vh[i], vh[i]); });
    Series vl2 = sweep(Species::Two, v0, [&](std::size_t i) { return f2(uh[i], vl[i], vl[i]); });
    double viol = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double here = std::max({(ul[i] - ul2[i]).maxCoeff(), (ul2[i] - uh2[i]).maxCoeff(),
                                    (uh2[i] - uh[i]).maxCoeff(), (vl[i] - vl2[i]).maxCoeff(),
                                    (vl2[i] - vh2[i]).maxCoeff(), (vh2[i] - vh[i]).maxCoeff()});
      if (here > viol) {
        viol = here;
        where = i;
      }
    }
    out.max_order_violation = std::max(out.max_order_violation, viol);
    if (viol > kOrderTol) {
      fail(ErrorCode::NoConvergence, describe("sandwich order breached by", viol) +
                                         " at iteration " + std::to_string(it) + ", t=" +
                                         std::to_string(grid[where]) +
                                         "; the Lipschitz constant may be too small");
    }
    uh = std::move(uh2);
    ul = std::move(ul2);
    vh = std::move(vh2);
    vl = std::move(vl2);
    gap = gap_of();
  } while (gap >= tol);

  out.iterations = it;
  out.final_gap = gap;
  Trajectory& tr = out.trajectory;
  tr.params = p;
  tr.bc = problem.bc();
  tr.bounds = invariant_rectangle(problem, start);
  tr.times = grid;
  for (std::size_t i = 0; i < N; ++i) {
    FieldPair s{Field::Zero(static_cast<Eigen::Index>(n)), Field::Zero(static_cast<Eigen::Index>(n))};
    for (Eigen::Index j = 0; j < k; ++j) {
      s.u(ev[j]) = 0.5 * (uh[i](j) + ul[i](j));
      s.v(ev[j]) = 0.5 * (vh[i](j) + vl[i](j));
    }
    s.u = problem.projector(Species::One) * s.u;
    s.v = problem.projector(Species::Two) * s.v;
    tr.states.push_back(std::move(s));
  }
  return out;
}

}  // namespace lvg
