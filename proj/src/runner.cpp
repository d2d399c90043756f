#include "lvgraph/runner.hpp"

#include "lvgraph/error.hpp"
#include "lvgraph/fixtures.hpp"
#include "lvgraph/monotone.hpp"
#include "lvgraph/spectral.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lvg {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot rename onto " + path.string() + ": " + ec.message());
}

namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json field_json(const Problem& problem, const Field& f) {
  json j = json::object();
  for (std::size_t x : problem.active()) j[problem.graph().name(x)] = f(x);
  return j;
}

json stats_json(const StepStats& s) {
  return {{"dt", s.dt}, {"steps", s.steps}, {"rejected", s.rejected}, {"clamped", s.clamped}};
}

json regime_json(const Regime& r) {
  json certs = json::object();
  for (const auto& c : r.certificates) certs[c.name] = c.margin;
  json j = {{"kind", std::string(to_string(r.kind))}, {"certificates", certs}};
  if (r.constant_limit) j["limit"] = {r.constant_limit->first, r.constant_limit->second};
  return j;
}

bool resolved(RegimeKind k) { return k != RegimeKind::Unresolved && k != RegimeKind::Bistable; }

/// Every violated invariant on one sample, as text.
void check_sample(const Problem& problem, const Trajectory& traj, std::size_t i,
                  std::vector<std::string>& out) {
  const FieldPair& s = traj.states[i];
  const double t = traj.times[i];
  for (std::size_t x : problem.active()) {
    const std::string where = " at t=" + format_double(t) + ", " + problem.graph().name(x);
    if (s.u(x) < 0.0 || s.v(x) < 0.0) out.push_back("negative density" + where);
    if (s.u(x) > traj.bounds.m_u + 1e-9 || s.v(x) > traj.bounds.m_v + 1e-9) {
      out.push_back("outside invariant rectangle" + where);
    }
  }
  if (problem.bc() == BoundaryCondition::Neumann) {
    const auto& part = problem.partition();
    for (std::size_t z : part.boundary()) {
      const double du = normal_derivative(problem.graph(), Species::One, part, s.u, z);
      const double dv = normal_derivative(problem.graph(), Species::Two, part, s.v, z);
      const double scale = 1.0 + std::max(traj.bounds.m_u, traj.bounds.m_v);
      if (std::abs(du) > 1e-12 * scale || std::abs(dv) > 1e-12 * scale) {
        out.push_back("nonzero normal derivative at t=" + format_double(t) + ", " +
                      problem.graph().name(z));
      }
    }
  }
}

std::optional<PredictedLimit> try_limit(const Regime& regime, const Problem& problem) {
  if (!resolved(regime.kind)) return std::nullopt;
  return predicted_limit(regime, problem);
}

json summary_json(const Problem& problem, const Trajectory& traj, const RunReport& r) {
  json j;
  j["bc"] = std::string(to_string(problem.bc()));
  j["t_end"] = traj.times.back();
  j["final_state"] = {{"u", field_json(problem, r.final_state.u)},
                      {"v", field_json(problem, r.final_state.v)}};
  j["bounds"] = {{"m_u", r.bounds.m_u}, {"m_v", r.bounds.m_v}};
  j["steps"] = stats_json(r.stats);
  if (r.regime) j["regime"] = regime_json(*r.regime);
  j["trailing_distance"] = r.trailing_distance ? json(*r.trailing_distance) : json(nullptr);
  j["invariants_ok"] = r.invariants_ok;
  j["violations"] = r.violations;
  j["seconds"] = r.seconds;
  return j;
}

}  // namespace

std::string trajectory_csv(const Problem& problem, const Trajectory& traj) {
  const auto& active = problem.active();
  std::string out = "t";
  for (std::size_t x : active) out += ",u@" + problem.graph().name(x);
  for (std::size_t x : active) out += ",v@" + problem.graph().name(x);
  out += '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_double(traj.times[i]);
    for (std::size_t x : active) out += "," + format_double(traj.states[i].u(x));
    for (std::size_t x : active) out += "," + format_double(traj.states[i].v(x));
    out += '\n';
  }
  return out;
}

Regime classify_problem(const Problem& problem, const FieldPair& initial, double tol) {
  const auto& p = problem.params();
  if (problem.bc() != BoundaryCondition::Dirichlet) {
    Regime r = classify_neumann(p);
    if (r.kind != RegimeKind::Bistable) return r;
    const FieldPair start = prepare_initial(problem, initial);
    Regime basin = classify_bistable_basin(p, start, problem.active());
    if (basin.kind == RegimeKind::Unresolved) {
      r.certificates.insert(r.certificates.end(), basin.certificates.begin(),
                            basin.certificates.end());
      return r;  // bistable, basin not certified
    }
    basin.certificates.insert(basin.certificates.begin(), r.certificates.begin(),
                              r.certificates.end());
    return basin;
  }
  const auto& part = problem.partition();
  const EigenPair e1 = smallest_dirichlet_eigenpair(problem.graph(), Species::One, part);
  const EigenPair e2 = smallest_dirichlet_eigenpair(problem.graph(), Species::Two, part);
  Regime r = classify_dirichlet(p, e1, e2);
  if (r.kind == RegimeKind::CoexistBounds) {
    r = classify_dirichlet(p, e1, e2, coexistence_bounds(problem, std::nullopt, std::nullopt, tol));
  }
  return r;
}

double limit_distance(const Problem& problem, const FieldPair& state, const PredictedLimit& limit) {
  if (limit.state) return sup_distance(problem, state, *limit.state);
  const CoexistenceBounds& b = *limit.bounds;
  double d = 0.0;
  for (std::size_t x : problem.active()) {
    d = std::max({d, b.s_lower(x) - state.u(x), state.u(x) - b.s_upper(x),
                  b.r_lower(x) - state.v(x), state.v(x) - b.r_upper(x)});
  }
  return d;
}

RunReport run_simulate(const RunConfig& cfg, bool write_files) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.t_end > 0.0)) fail(ErrorCode::ConfigInvalid, "t_end must be positive");
  std::optional<Problem> built;
  try {
    built.emplace(cfg.make_problem());
    (void)prepare_initial(*built, cfg.initial);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    fail(ErrorCode::ConfigInvalid, e.what());
  }
  const Problem& problem = *built;

  const Trajectory traj = integrate(problem, cfg.initial, cfg.t_end, cfg.step, cfg.samples);

  RunReport r;
  r.final_state = traj.final_state();
  r.final_time = traj.times.back();
  r.bounds = traj.bounds;
  r.stats = traj.stats;
  for (std::size_t i = 0; i < traj.times.size(); ++i) check_sample(problem, traj, i, r.violations);
  if (r.violations.size() > 20) r.violations.resize(20);
  r.invariants_ok = r.violations.empty();

  r.regime = classify_problem(problem, cfg.initial);
  if (const auto limit = try_limit(*r.regime, problem)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      if (traj.times[i] >= 0.9 * cfg.t_end) {
        worst = std::max(worst, limit_distance(problem, traj.states[i], *limit));
      }
    }
    r.trailing_distance = worst;
  }

  if (write_files) {
    const fs::path dir(cfg.out);
    make_dir(dir);
    write_file_atomic(dir / "trajectory.csv", trajectory_csv(problem, traj));
    r.manifest.push_back((dir / "trajectory.csv").string());
    r.manifest.push_back((dir / "summary.json").string());
    r.seconds = seconds_since(start);
    json j = summary_json(problem, traj, r);
    j["manifest"] = r.manifest;
    write_file_atomic(dir / "summary.json", j.dump(2) + "\n");
  }
  r.seconds = seconds_since(start);
  return r;
}

ReproduceReport run_reproduce(std::string_view id, const std::optional<fs::path>& out_dir,
                              double t_end, double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  const ReproductionCase c = reproduction_case(id);
  ReproduceReport r;
  r.id = c.id;
  r.limit_u = c.limit_u;
  r.limit_v = c.limit_v;
  r.t_end = t_end;
  r.tolerance = tolerance;

  const Trajectory traj = integrate(c.problem, c.initial, t_end, StepPolicy{}, SampleSchedule{});
  FieldPair limit{Field::Zero(static_cast<Eigen::Index>(c.problem.size())),
                  Field::Zero(static_cast<Eigen::Index>(c.problem.size()))};
  for (std::size_t x : c.problem.active()) {
    limit.u(x) = c.limit_u;
    limit.v(x) = c.limit_v;
  }
  // Walk backwards to the last sample that was still outside the tolerance.
  for (std::size_t i = traj.times.size(); i-- > 0;) {
    if (sup_distance(c.problem, traj.states[i], limit) >= tolerance) break;
    r.settled_at = traj.times[i];
  }
  r.distance = sup_distance(c.problem, traj.final_state(), limit);
  r.passed = r.distance < tolerance;

  if (out_dir) {
    make_dir(*out_dir);
    write_file_atomic(*out_dir / "trajectory.csv", trajectory_csv(c.problem, traj));
    r.manifest = {(*out_dir / "trajectory.csv").string(), (*out_dir / "summary.json").string()};
    json j = {{"id", r.id},
              {"passed", r.passed},
              {"limit", {r.limit_u, r.limit_v}},
              {"distance", r.distance},
              {"tolerance", r.tolerance},
              {"t_end", r.t_end},
              {"settled_at", r.settled_at ? json(*r.settled_at) : json(nullptr)},
              {"steps", stats_json(traj.stats)},
              {"manifest", r.manifest},
              {"seconds", seconds_since(start)}};
    write_file_atomic(*out_dir / "summary.json", j.dump(2) + "\n");
  }
  r.seconds = seconds_since(start);
  return r;
}

namespace {

double& param_slot(CompetitionParams& p, const std::string& name) {
  if (name == "a1") return p.a1;
  if (name == "b1") return p.b1;
  if (name == "c1") return p.c1;
  if (name == "a2") return p.a2;
  if (name == "b2") return p.b2;
  if (name == "c2") return p.c2;
  if (name == "d1") return p.d1;
  if (name == "d2") return p.d2;
  fail(ErrorCode::ConfigInvalid, "unknown parameter '" + name + "'");
}

CompetitionParams sweep_point(const RunConfig& cfg, std::size_t index) {
  CompetitionParams p = cfg.params;
  // Last axis varies fastest.
  std::size_t rest = index;
  const auto& axes = cfg.sweep->axes;
  for (std::size_t k = axes.size(); k-- > 0;) {
    param_slot(p, axes[k].param) = axes[k].value(rest % axes[k].count);
    rest /= axes[k].count;
  }
  return p;
}

SweepRow sweep_one(const RunConfig& cfg, std::size_t index, double agreement_tol) {
  SweepRow row;
  row.index = index;
  row.params = sweep_point(cfg, index);
  try {
    const Problem problem = cfg.make_problem(row.params);
    const Regime regime = classify_problem(problem, cfg.initial);
    row.kind = regime.kind;
    row.certificates = regime.certificates;
    row.min_margin = regime.min_margin();
    const Trajectory traj =
        integrate(problem, cfg.initial, cfg.t_end, cfg.step, SampleSchedule{0.0, 0.0, cfg.t_end, {}});
    const FieldPair& end = traj.final_state();
    row.u_min = row.v_min = std::numeric_limits<double>::infinity();
    row.u_max = row.v_max = -std::numeric_limits<double>::infinity();
    for (std::size_t x : problem.active()) {
      row.u_min = std::min(row.u_min, end.u(x));
      row.u_max = std::max(row.u_max, end.u(x));
      row.v_min = std::min(row.v_min, end.v(x));
      row.v_max = std::max(row.v_max, end.v(x));
    }
    if (const auto limit = try_limit(regime, problem)) {
      row.distance = limit_distance(problem, end, *limit);
      row.agreement = *row.distance <= agreement_tol ? "yes" : "no";
    } else {
      row.agreement = "na";
    }
  } catch (const Error& e) {
    row.agreement = std::string("error: ") + std::string(to_string(e.code()));
  }
  return row;
}

std::string sweep_header() {
  return "point,a1,b1,c1,a2,b2,c2,d1,d2,kind,certificates,min_margin,u_min,u_max,v_min,v_max,"
         "distance,agreement\n";
}

std::string sweep_line(const SweepRow& r) {
  const auto& p = r.params;
  std::string s = std::to_string(r.index);
  for (double x : {p.a1, p.b1, p.c1, p.a2, p.b2, p.c2, p.d1, p.d2}) s += "," + format_double(x);
  s += ",";
  s += to_string(r.kind);
  s += ",";
  for (std::size_t i = 0; i < r.certificates.size(); ++i) {
    if (i) s += ";";
    s += r.certificates[i].name + "=" + format_double(r.certificates[i].margin);
  }
  s += "," + format_double(r.min_margin);
  for (double x : {r.u_min, r.u_max, r.v_min, r.v_max}) s += "," + format_double(x);
  s += "," + (r.distance ? format_double(*r.distance) : std::string());
  s += "," + r.agreement + "\n";
  return s;
}

}  // namespace

SweepReport run_sweep(const RunConfig& cfg, int workers, double agreement_tol, double exempt_margin) {
  const auto start = std::chrono::steady_clock::now();
  if (!cfg.sweep) fail(ErrorCode::ConfigInvalid, "config has no sweep block");
  const std::size_t total = cfg.sweep->points();
  if (total > cfg.sweep->max_points) {
    fail(ErrorCode::GridTooLarge, std::to_string(total) + " points exceed the cap of " +
                                      std::to_string(cfg.sweep->max_points));
  }
  for (std::size_t i = 0; i < total; ++i) {
    try {
      sweep_point(cfg, i).validate();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigInvalid, "sweep point " + std::to_string(i) + ": " + e.what());
    }
  }

  const fs::path dir(cfg.out);
  const fs::path parts = dir / "points";
  make_dir(parts);

  // Each worker owns distinct slots of `rows`; no other state is shared.
  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  std::mutex io_error_lock;
  std::optional<Error> io_error;
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      rows[i] = sweep_one(cfg, i, agreement_tol);
      try {
        write_file_atomic(parts / ("point-" + std::to_string(i) + ".csv"), sweep_line(rows[i]));
      } catch (const Error& e) {
        std::lock_guard lock(io_error_lock);
        if (!io_error) io_error = e;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (io_error) throw *io_error;

  // Merge in point order, single-threaded.
  SweepReport report;
  std::string csv = sweep_header();
  for (std::size_t i = 0; i < total; ++i) {
    const fs::path f = parts / ("point-" + std::to_string(i) + ".csv");
    std::ifstream in(f, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "missing " + f.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    csv += buf.str();
  }
  report.csv_path = dir / "sweep.csv";
  write_file_atomic(report.csv_path, csv);

  for (const SweepRow& row : rows) {
    if (row.agreement == "no" && row.min_margin > exempt_margin) ++report.disagreements;
    if (row.agreement.rfind("error", 0) == 0) ++report.failures;
  }
  report.rows = std::move(rows);
  report.seconds = seconds_since(start);
  return report;
}

namespace {

Problem dirichlet_problem(const RunConfig& cfg, std::string_view what) {
  Problem problem = cfg.make_problem();
  if (problem.bc() != BoundaryCondition::Dirichlet) {
    fail(ErrorCode::ConfigInvalid, std::string(what) + " needs bc = dirichlet");
  }
  return problem;
}

}  // namespace

std::string run_eigen(const RunConfig& cfg) {
  if (!cfg.interior) fail(ErrorCode::ConfigInvalid, "eigen needs graph.interior");
  const WeightedGraph g = build_graph(cfg.vertices, cfg.weights_1, cfg.weights_2, cfg.measure_1,
                                      cfg.measure_2);
  const DomainPartition part = boundary_of(g, *cfg.interior);
  const EigenPair e1 = smallest_dirichlet_eigenpair(g, Species::One, part);
  const EigenPair e2 = smallest_dirichlet_eigenpair(g, Species::Two, part);
  std::string out = "lambda0_1," + format_double(e1.lambda0) + "\n";
  out += "lambda0_2," + format_double(e2.lambda0) + "\n";
  out += "vertex,phi1,phi2\n";
  for (std::size_t x : part.interior()) {
    out += g.name(x) + "," + format_double(e1.phi(x)) + "," + format_double(e2.phi(x)) + "\n";
  }
  return out;
}

std::string run_steady(const RunConfig& cfg) {
  const Problem problem = dirichlet_problem(cfg, "steady");
  const auto& p = problem.params();
  const auto& part = problem.partition();
  const auto n = static_cast<Eigen::Index>(problem.size());
  auto logistic = [&](Species s, double d, double a, double E) -> Field {
    try {
      return logistic_steady_state(problem.graph(), part, s, d, a, E, 1e-12).values;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPositiveState) throw;
      return Field::Zero(n);
    }
  };
  const Field s1 = logistic(Species::One, p.d1, p.a1, p.b1);
  const Field s2 = logistic(Species::Two, p.d2, p.a2, p.c2);

  const fs::path dir(cfg.out);
  make_dir(dir);
  std::string steady = "vertex,s1,s2\n";
  for (std::size_t x : part.closure()) {
    steady += problem.graph().name(x) + "," + format_double(s1(x)) + "," + format_double(s2(x)) +
              "\n";
  }
  write_file_atomic(dir / "steady.csv", steady);
  std::string printed = steady;

  const Regime r = classify_problem(problem, cfg.initial, cfg.tol);
  if (r.bounds) {
    const auto& b = *r.bounds;
    std::string csv = "vertex,s_lo,s_hi,r_lo,r_hi\n";
    for (std::size_t x : part.closure()) {
      csv += problem.graph().name(x) + "," + format_double(b.s_lower(x)) + "," +
             format_double(b.s_upper(x)) + "," + format_double(b.r_lower(x)) + "," +
             format_double(b.r_upper(x)) + "\n";
    }
    write_file_atomic(dir / "bounds.csv", csv);
    printed += "\n" + csv;
  }
  return printed;
}

std::string run_classify(const RunConfig& cfg) {
  const Problem problem = cfg.make_problem();
  const Regime r = classify_problem(problem, cfg.initial, cfg.tol);
  std::string out = "kind," + std::string(to_string(r.kind)) + "\n";
  for (const auto& c : r.certificates) out += "margin:" + c.name + "," + format_double(c.margin) + "\n";
  if (r.constant_limit) {
    out += "limit," + format_double(r.constant_limit->first) + "," +
           format_double(r.constant_limit->second) + "\n";
    return out;
  }
  if (!resolved(r.kind)) return out;
  const PredictedLimit limit = predicted_limit(r, problem);
  const fs::path dir(cfg.out);
  make_dir(dir);
  std::string csv;
  if (limit.state) {
    csv = "vertex,u,v\n";
    for (std::size_t x : problem.active()) {
      csv += problem.graph().name(x) + "," + format_double(limit.state->u(x)) + "," +
             format_double(limit.state->v(x)) + "\n";
    }
  } else {
    const auto& b = *limit.bounds;
    csv = "vertex,s_lo,s_hi,r_lo,r_hi\n";
    for (std::size_t x : problem.active()) {
      csv += problem.graph().name(x) + "," + format_double(b.s_lower(x)) + "," +
             format_double(b.s_upper(x)) + "," + format_double(b.r_lower(x)) + "," +
             format_double(b.r_upper(x)) + "\n";
    }
  }
  write_file_atomic(dir / "limit.csv", csv);
  out += "limit," + (dir / "limit.csv").string() + "\n";
  return out;
}

}  // namespace lvg
