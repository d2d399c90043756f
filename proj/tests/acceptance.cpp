// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "lvgraph/classify.hpp"
#include "lvgraph/error.hpp"
#include "lvgraph/fixtures.hpp"
#include "lvgraph/monotone.hpp"
#include "lvgraph/runner.hpp"
#include "lvgraph/spectral.hpp"
#include "support/linear_systems.hpp"
#include "support/oracles.hpp"
#include "support/random_problems.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace lvg;
using namespace lvg::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FieldPair rectangle_upper(const Problem& p, const RectangleBounds& b) {
  const auto n = static_cast<Eigen::Index>(p.size());
  FieldPair up{Field::Zero(n), Field::Zero(n)};
  for (std::size_t x : p.active()) {
    up.u(x) = b.m_u;
    up.v(x) = b.m_v;
  }
  return up;
}

FieldPair zero_pair(const Problem& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  return {Field::Zero(n), Field::Zero(n)};
}

double sup_gap(const Problem& p, const FieldPair& a, const FieldPair& b) {
  double d = 0.0;
  for (std::size_t x : p.active()) {
    d = std::max({d, std::abs(a.u(x) - b.u(x)), std::abs(a.v(x) - b.v(x))});
  }
  return d;
}

/// Reproduction fixtures plus the Dirichlet coexistence fixture with a fixed
/// positive start; every problem here has at most five vertices.
struct Fixture {
  std::string id;
  Problem problem;
  FieldPair initial;
};

std::vector<Fixture> small_fixtures() {
  std::vector<Fixture> out;
  for (const auto& id : reproduction_ids()) {
    ReproductionCase c = reproduction_case(id);
    out.push_back({id, c.problem, c.initial});
  }
  Problem coexist = coexistence_fixture();
  FieldPair init = zero_pair(coexist);
  init.u << 1.5, 0.5, 1.0, 0.0, 0.0;
  init.v << 0.2, 1.7, 0.9, 0.0, 0.0;
  out.push_back({"dirichlet-coexist", coexist, init});
  return out;
}

// 1 ------------------------------------------------------------------------
Verdict reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  double worst = 0.0;
  std::string failed;
  for (const auto& id : reproduction_ids()) {
    const ReproduceReport r = run_reproduce(id, std::nullopt, 1000.0, 1e-3);
    worst = std::max(worst, r.distance);
    if (!r.passed) failed += " " + id;
  }
  const double secs = elapsed(t0);
  v.pass = failed.empty() && secs < 30.0;
  v.detail = "10 fixtures, worst sup-distance " + fmt(worst) + " (tol 1e-3) at T=1000, " +
             fmt(secs) + " s (cap 30 s)" + (failed.empty() ? "" : ", failed:" + failed);
  return v;
}

// 2 ------------------------------------------------------------------------
Verdict eigen_oracle() {
  Verdict v;
  const WeightedGraph g = five_vertex_graph();
  const DomainPartition part = five_vertex_interior(g);
  const double closed_form = (5.0 - std::sqrt(13.0)) / 6.0;  // root of 3L^2 - 5L + 1
  const EigenPair e = smallest_dirichlet_eigenpair(g, Species::One, part);
  const double dense = dense_dirichlet_spectrum(g, Species::One, part).minCoeff();
  double worst_fixture = std::max(std::abs(e.lambda0 - closed_form), std::abs(dense - closed_form));

  Rng rng(20261016);
  double worst_random = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = pick(rng, 2, 9);
    GraphShape shape;
    shape.degree_measure = trial % 2 == 0;
    const WeightedGraph rg = random_graph(rng, n, shape);
    const DomainPartition rp = random_interior(rng, rg, pick(rng, 1, std::min<std::size_t>(6, n - 1)));
    for (Species s : {Species::One, Species::Two}) {
      const EigenPair re = smallest_dirichlet_eigenpair(rg, s, rp);
      const double oracle = dense_dirichlet_spectrum(rg, s, rp).minCoeff();
      const double err = std::abs(re.lambda0 - oracle);
      worst_random = std::max(worst_random, err);
      if (err > 1e-10) ++bad;
    }
  }
  v.pass = worst_fixture <= 1e-10 && bad == 0;
  v.detail = "five-vertex |lambda0 - (5-sqrt13)/6| = " + fmt(worst_fixture) +
             "; 50 random graphs x 2 species, worst |diff| vs dense solver " + fmt(worst_random) +
             " (tol 1e-10), " + std::to_string(bad) + " over";
  return v;
}

// 3 ------------------------------------------------------------------------

Verdict maximum_principle_suite() {
  Verdict v;
  Rng rng(7331);
  int failures = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    LinearInstance inst = random_linear_instance(rng);
    inst.system.graph = &inst.graph;
    try {
      const MaximumPrincipleVerdict r = maximum_principle_check(inst.system, inst.samples);
      worst = std::max(worst, r.max_value);
      if (!r.nonpositive) ++failures;
    } catch (const Error& e) {
      ++failures;
      v.detail += std::string(" [trial ") + std::to_string(trial) + ": " + e.what() + "]";
    }
  }
  v.pass = failures == 0;
  v.detail = "100 random systems (m in 1..3, <= 6 vertices, whole/Neumann/Dirichlet), max u_k " +
             fmt(worst) + " (tol 1e-9), " + std::to_string(failures) + " failures" + v.detail;
  return v;
}

// 4 ------------------------------------------------------------------------

struct RandomPair {
  Problem problem;
  OrderedPair pair;
  FieldPair initial;
  std::string kind;
};

CompetitionParams regime_params(Rng& rng, EnvelopeRegime regime) {
  CompetitionParams p = random_params(rng);
  const double rb = p.b1 / p.b2, rc = p.c1 / p.c2;
  switch (regime) {
    case EnvelopeRegime::VWins:
      p.a1 = p.a2 * std::min(rb, rc) * uniform(rng, 0.3, 0.9);
      break;
    case EnvelopeRegime::UWins:
      p.a1 = p.a2 * std::max(rb, rc) * uniform(rng, 1.2, 3.0);
      break;
    case EnvelopeRegime::Coexist:
      if (rc >= rb) p.c1 = p.c2 * rb * uniform(rng, 0.2, 0.8);  // need c1/c2 < b1/b2
      {
        const double lo = p.c1 / p.c2, hi = p.b1 / p.b2;
        p.a1 = p.a2 * (lo + uniform(rng, 0.2, 0.8) * (hi - lo));
      }
      break;
  }
  return p;
}

RandomPair random_pair(Rng& rng, int trial) {
  if (trial % 2 == 0) {
    // Constant rectangle pair; the lower corner is pushed up where the
    // inequalities allow it.
    Problem p = random_problem(rng, 6);
    const auto& q = p.params();
    const FieldPair init = prepare_initial(p, random_initial(rng, p));
    const RectangleBounds b = invariant_rectangle(p, init);
    const double U = b.m_u * uniform(rng, 1.0, 1.5), V = b.m_v * uniform(rng, 1.0, 1.5);
    FieldPair up = zero_pair(p), lo = zero_pair(p);
    const bool pinned = p.bc() == BoundaryCondition::Dirichlet;
    const double ul = pinned ? 0.0 : std::max(0.0, (q.a1 - q.c1 * V) / q.b1) * uniform(rng, 0, 1);
    const double vl = pinned ? 0.0 : std::max(0.0, (q.a2 - q.b2 * U) / q.c2) * uniform(rng, 0, 1);
    for (std::size_t x : p.active()) {
      up.u(x) = U;
      up.v(x) = V;
      lo.u(x) = ul;
      lo.v(x) = vl;
    }
    // Start inside [lo, up].
    FieldPair start = init;
    for (std::size_t x : p.active()) {
      start.u(x) = std::clamp(start.u(x), ul, U);
      start.v(x) = std::clamp(start.v(x), vl, V);
    }
    start = prepare_initial(p, start);
    return {p, constant_pair(up, lo, 0.0, 5.0), start, "constant"};
  }
  const auto regime = static_cast<EnvelopeRegime>(1 + (trial / 2) % 3);
  Problem base = random_problem(rng, 6, pick(rng, 0, 1) ? BoundaryCondition::Neumann
                                                         : BoundaryCondition::NoBoundary);
  Problem p = base.with_params(regime_params(rng, regime));
  const auto& q = p.params();
  FieldPair init = zero_pair(p);
  for (std::size_t x : p.evolved()) {
    init.u(x) = q.a1 / q.b1 * uniform(rng, 0.3, 0.95);
    init.v(x) = q.a2 / q.c2 * uniform(rng, 0.3, 0.95);
  }
  init = prepare_initial(p, init);
  Envelope env = analytic_envelopes(regime, p, std::nullopt, 0.0, init);
  env.pair.t1 = 5.0;
  return {p, env.pair, init, "envelope-" + std::to_string(static_cast<int>(regime))};
}

Verdict comparison_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  Rng rng(4242);
  int unverified = 0, disordered = 0, sweep_failures = 0;
  double worst_order = 0.0, worst_sandwich = 0.0;
  std::string notes;
  const std::vector<double> grid = uniform_grid(0.0, 5.0, 0.01);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RandomPair rp = [&] {
      for (;;) {
        try {
          return random_pair(rng, trial);
        } catch (const Error& e) {
          // Only NoAdmissibleSigma may reject a draw (data too close to 0).
          if (e.code() != ErrorCode::NoAdmissibleSigma) throw;
        }
      }
    }();
    const PairReport rep = verify_coupled_pair(rp.problem, rp.pair, grid, &rp.initial);
    if (!rep.passed) {
      ++unverified;
      notes += " [" + rp.kind + " unverified, worst " + fmt(rep.worst()) + "]";
      continue;
    }
    // Comparison: the solution from inside the pair stays inside it.
    SampleSchedule sched;
    sched.uniform = 0.05;
    const Trajectory tr = integrate(rp.problem, rp.initial, 5.0, StepPolicy{}, sched);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const FieldPair hi = rp.pair.upper(tr.times[i]), lo = rp.pair.lower(tr.times[i]);
      for (std::size_t x : rp.problem.active()) {
        worst_order = std::max({worst_order, lo.u(x) - hi.u(x), lo.v(x) - hi.v(x)});
        worst_sandwich = std::max({worst_sandwich, tr.states[i].u(x) - hi.u(x),
                                   lo.u(x) - tr.states[i].u(x), tr.states[i].v(x) - hi.v(x),
                                   lo.v(x) - tr.states[i].v(x)});
      }
    }
    // Monotone sequences on the first 20 constant pairs.
    if (rp.kind == "constant" && solved < 20) {
      ++solved;
      const auto& q = rp.problem.params();
      const FieldPair top = rp.pair.upper(0.0);
      const double lip = default_lipschitz(q, {top.u.maxCoeff(), top.v.maxCoeff()});
      const double deg = std::max(
          q.d1 * max_weighted_degree(rp.problem.graph(), Species::One, rp.problem.mode()),
          q.d2 * max_weighted_degree(rp.problem.graph(), Species::Two, rp.problem.mode()));
      const std::vector<double> mgrid = uniform_grid(0.0, 1.0, 1.0 / (deg + lip));
      try {
        const MonotoneSolution ms =
            monotone_solve(rp.problem, rp.pair, rp.initial, mgrid, lip, 1e-9);
        if (ms.max_order_violation > 1e-12) ++sweep_failures;
      } catch (const Error& e) {
        ++sweep_failures;
        notes += std::string(" [monotone_solve: ") + e.what() + "]";
      }
    }
  }
  if (worst_order > 1e-12 || worst_sandwich > 1e-8) ++disordered;

  // monotone_solve against integrate on every small fixture.
  double worst_match = 0.0;
  for (const Fixture& f : small_fixtures()) {
    const FieldPair init = prepare_initial(f.problem, f.initial);
    const RectangleBounds b = invariant_rectangle(f.problem, init);
    const OrderedPair pair = constant_pair(rectangle_upper(f.problem, b), zero_pair(f.problem), 0.0, 1.0);
    const std::vector<double> g = graded_grid(0.0, 1.0, 1e-6, 5e-5, 1.05);
    const MonotoneSolution ms = monotone_solve(f.problem, pair, init, g, 0.0, 1e-10);
    SampleSchedule sched;
    sched.first = 0.0;
    sched.forced = g;
    StepPolicy fine;
    fine.dt = 1e-4;
    const Trajectory tr = integrate(f.problem, init, 1.0, fine, sched);
    if (tr.times.size() != ms.trajectory.times.size()) {
      notes += " [" + f.id + ": sample mismatch]";
      worst_match = std::numeric_limits<double>::infinity();
      continue;
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      worst_match = std::max(worst_match, sup_gap(f.problem, tr.states[i], ms.trajectory.states[i]));
    }
    if (ms.max_order_violation > 1e-12) ++sweep_failures;
  }

  v.pass = unverified == 0 && disordered == 0 && sweep_failures == 0 && worst_match <= 1e-6;
  v.detail = "100 pairs: " + std::to_string(unverified) + " unverified, order breach " +
             fmt(worst_order) + ", solution outside pair by " + fmt(worst_sandwich) +
             " (tol 1e-8); sandwich breaches on " + std::to_string(solved) +
             " + 11 monotone solves: " + std::to_string(sweep_failures) +
             "; monotone_solve vs integrate on 11 fixtures " + fmt(worst_match) + " (tol 1e-6), " +
             fmt(elapsed(t0)) + " s" + notes;
  return v;
}

// 5 ------------------------------------------------------------------------
Verdict structural_invariants() {
  Verdict v;
  Rng rng(99);
  double divergence = 0.0, kernel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GraphShape shape;
    shape.degree_measure = trial % 2 == 0;
    const WeightedGraph g = random_graph(rng, pick(rng, 2, 8), shape);
    Field u(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = uniform(rng, -1, 1);
    const double c = uniform(rng, -3, 3);
    const Field constant = Field::Constant(u.size(), c);
    for (Species s : {Species::One, Species::Two}) {
      const Field lap = laplacian_apply(g, s, DomainMode::whole_graph(), u);
      divergence = std::max(divergence, std::abs(g.measures(s).dot(lap)));
      kernel = std::max(kernel, laplacian_apply(g, s, DomainMode::whole_graph(), constant).cwiseAbs().maxCoeff());
      if (g.size() > 1) {
        const DomainPartition part = random_interior(rng, g, pick(rng, 1, g.size() - 1));
        kernel = std::max(kernel, laplacian_apply(g, s, DomainMode::subgraph(part), constant).cwiseAbs().maxCoeff());
      }
    }
  }

  double min_positive = std::numeric_limits<double>::infinity();
  double rectangle = -std::numeric_limits<double>::infinity();
  double normal = 0.0;
  for (const auto& id : reproduction_ids()) {
    const ReproductionCase c = reproduction_case(id);
    const Trajectory tr = integrate(c.problem, c.initial, 1000.0);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const FieldPair& s = tr.states[i];
      for (std::size_t x : c.problem.active()) {
        if (i > 0) min_positive = std::min({min_positive, s.u(x), s.v(x)});
        rectangle = std::max({rectangle, s.u(x) - tr.bounds.m_u, s.v(x) - tr.bounds.m_v});
      }
      if (c.problem.bc() == BoundaryCondition::Neumann) {
        const auto& part = c.problem.partition();
        for (std::size_t z : part.boundary()) {
          normal = std::max({normal,
                             std::abs(normal_derivative(c.problem.graph(), Species::One, part, s.u, z)),
                             std::abs(normal_derivative(c.problem.graph(), Species::Two, part, s.v, z))});
        }
      }
    }
  }
  v.pass = divergence <= 1e-12 && kernel <= 1e-12 && min_positive > 0.0 && rectangle <= 1e-9 &&
           normal <= 1e-14;
  v.detail = "|sum mu*Lap u| " + fmt(divergence) + ", |Lap const| " + fmt(kernel) +
             " (tol 1e-12); 10 trajectories: min density for t>0 " + fmt(min_positive) +
             ", max excess over rectangle " + fmt(rectangle) + " (tol 1e-9), max |normal derivative| " +
             fmt(normal) + " (tol 1e-14)";
  return v;
}

// 6 ------------------------------------------------------------------------
Verdict dirichlet_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  Rng rng(606);

  // Star with one interior centre: lambda0 = sum w / mu and s = (a - lambda0 d) / E.
  double closed = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t leaves = pick(rng, 1, 3);
    std::vector<std::string> names{"c"};
    WeightTable t;
    double wsum = 0.0;
    for (std::size_t i = 0; i < leaves; ++i) {
      names.push_back("b" + std::to_string(i));
      const double w = uniform(rng, 0.5, 2.0);
      wsum += w;
      t.push_back({"c", names.back(), w});
    }
    const double mu = uniform(rng, 0.5, 3.0);
    std::vector<double> measure(names.size(), 1.0);
    measure[0] = mu;
    const WeightedGraph g = build_graph(names, t, t, measure, measure);
    const DomainPartition part = boundary_of(g, std::vector<std::string>{"c"});
    const double lambda = wsum / mu;
    const double d = uniform(rng, 0.1, 2.0), E = uniform(rng, 0.5, 2.0);
    const double a = lambda * d + uniform(rng, 0.1, 2.0);
    const EigenPair e = smallest_dirichlet_eigenpair(g, Species::One, part);
    const SteadyState s = logistic_steady_state(g, part, Species::One, d, a, E, 1e-14);
    closed = std::max({closed, std::abs(e.lambda0 - lambda), std::abs(s.values(0) - (a - lambda * d) / E)});
  }

  // Subcritical species die out.
  double extinct = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Problem p = trial == 0 ? coexistence_fixture() : random_problem(rng, 6, BoundaryCondition::Dirichlet);
    const EigenPair e1 = smallest_dirichlet_eigenpair(p.graph(), Species::One, p.partition());
    const EigenPair e2 = smallest_dirichlet_eigenpair(p.graph(), Species::Two, p.partition());
    CompetitionParams q = p.params();
    q.d1 = std::max(q.d1, 0.5);
    q.d2 = std::max(q.d2, 0.5);
    q.a1 = uniform(rng, 0.1, 0.7) * e1.lambda0 * q.d1;
    q.a2 = uniform(rng, 0.1, 0.7) * e2.lambda0 * q.d2;
    const Problem sub = p.with_params(q);
    if (classify_problem(sub, zero_pair(sub)).kind != RegimeKind::BothExtinct) {
      extinct = std::numeric_limits<double>::infinity();
      continue;
    }
    const FieldPair init = random_initial(rng, sub, 3.0);
    const Trajectory tr = integrate(sub, init, 1000.0, StepPolicy{}, SampleSchedule{0, 0, 1000.0, {}});
    for (std::size_t x : sub.active()) {
      extinct = std::max({extinct, tr.final_state().u(x), tr.final_state().v(x)});
    }
  }

  // Sandwich on the symmetric coexistence fixture.
  const Problem fix = coexistence_fixture();
  const CoexistenceBounds b = coexistence_bounds(fix, std::nullopt, std::nullopt);
  double outside = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    FieldPair init = zero_pair(fix);
    for (std::size_t x : fix.evolved()) {
      init.u(x) = uniform(rng, 0.01, 3.0);
      init.v(x) = uniform(rng, 0.01, 3.0);
    }
    const Trajectory tr = integrate(fix, init, 1000.0, StepPolicy{}, SampleSchedule{0, 0, 1000.0, {}});
    const FieldPair& end = tr.final_state();
    for (std::size_t x : fix.active()) {
      outside = std::max({outside, b.s_lower(x) - end.u(x), end.u(x) - b.s_upper(x),
                          b.r_lower(x) - end.v(x), end.v(x) - b.r_upper(x)});
    }
  }
  v.pass = closed <= 1e-12 && extinct < 1e-4 && outside <= 1e-6;
  v.detail = "single-vertex closed forms " + fmt(closed) + " (tol 1e-12); 10 subcritical runs max density at T=1000 " +
             fmt(extinct) + " (tol 1e-4); 20 coexistence runs, worst excursion outside bounds " +
             fmt(outside) + " (tol 1e-6), " + fmt(elapsed(t0)) + " s";
  return v;
}

// 7 ------------------------------------------------------------------------
Verdict integrator_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  const double dt = 5e-5;
  double worst = 0.0;
  std::string worst_id;
  for (const Fixture& f : small_fixtures()) {
    StepPolicy pol;
    pol.dt = dt;
    const Trajectory tr = integrate(f.problem, f.initial, 1.0, pol, SampleSchedule{0, 0, 1.0, {}});
    const FieldPair ref = euler_reference(f.problem, prepare_initial(f.problem, f.initial), 1.0, dt / 100);
    const double d = sup_gap(f.problem, tr.final_state(), ref);
    if (d > worst) {
      worst = d;
      worst_id = f.id;
    }
  }
  v.pass = worst <= 1e-6;
  v.detail = "RK4 dt=" + fmt(dt) + " vs Euler dt/100 at t=1 on 11 fixtures, worst " + fmt(worst) +
             " (" + worst_id + ", tol 1e-6), " + fmt(elapsed(t0)) + " s";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 reproduction", reproduction},
      {"2 eigenvalue oracle", eigen_oracle},
      {"3 maximum principle", maximum_principle_suite},
      {"4 comparison and monotone iteration", comparison_suite},
      {"5 structural invariants", structural_invariants},
      {"6 Dirichlet regimes", dirichlet_checks},
      {"7 integrator oracle", integrator_oracle},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
