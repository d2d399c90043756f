// lvgraph: simulate, classify and reproduce two-species competition on graphs.
//
// Exit codes: 0 ok, 2 config error, 3 numerical failure (including violated
// trajectory invariants and failed sweep points), 4 reproduction or sweep
// agreement mismatch.

#include "lvgraph/config.hpp"
#include "lvgraph/error.hpp"
#include "lvgraph/fixtures.hpp"
#include "lvgraph/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit { Ok = 0, ConfigError = 2, NumericalFailure = 3, Mismatch = 4 };

bool is_config_error(lvg::ErrorCode c) {
  using lvg::ErrorCode;
  switch (c) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::IoFailure:
    case ErrorCode::UnknownExample:
    case ErrorCode::GridTooLarge:
      return true;
    default:
      return false;
  }
}

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<double> tol;
  std::optional<int> workers;

  lvg::RunConfig load() const {
    lvg::RunConfig cfg = lvg::load_config(config);
    if (out) cfg.out = *out;
    if (t_end) {
      if (!(*t_end > 0.0)) lvg::fail(lvg::ErrorCode::ConfigInvalid, "--t-end must be positive");
      cfg.t_end = *t_end;
    }
    if (dt) {
      if (*dt < 0.0) lvg::fail(lvg::ErrorCode::ConfigInvalid, "--dt must be nonnegative");
      cfg.step.dt = *dt;
    }
    if (tol) cfg.tol = *tol;
    if (workers) cfg.workers = *workers;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Overrides& o, bool needs_config) {
  auto* opt = cmd->add_option("--config", o.config, "run description (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--dt", o.dt, "fixed RK4 step (0: stability cap)");
  cmd->add_option("--tol", o.tol, "tolerance override");
  cmd->add_option("--workers", o.workers, "sweep worker threads")->check(CLI::PositiveNumber);
}

int simulate(const Overrides& o) {
  const lvg::RunReport r = lvg::run_simulate(o.load());
  std::printf("t_end,%s\n", lvg::format_double(r.final_time).c_str());
  std::printf("steps,%zu\nrejected,%zu\nclamped,%zu\n", r.stats.steps, r.stats.rejected,
              r.stats.clamped);
  if (r.regime) std::printf("regime,%s\n", std::string(lvg::to_string(r.regime->kind)).c_str());
  if (r.trailing_distance) {
    std::printf("trailing_distance,%s\n", lvg::format_double(*r.trailing_distance).c_str());
  }
  for (const auto& f : r.manifest) std::printf("wrote,%s\n", f.c_str());
  for (const auto& v : r.violations) std::fprintf(stderr, "invariant violated: %s\n", v.c_str());
  return r.invariants_ok ? Ok : NumericalFailure;
}

int reproduce(const std::string& id, const Overrides& o) {
  const double t_end = o.t_end.value_or(1000.0);
  if (!(t_end > 0.0)) lvg::fail(lvg::ErrorCode::ConfigInvalid, "--t-end must be positive");
  std::optional<std::filesystem::path> out;
  if (o.out) out = *o.out;
  const lvg::ReproduceReport r = lvg::run_reproduce(id, out, t_end, o.tol.value_or(1e-3));
  std::printf("%s %s limit=(%s,%s) distance=%s tolerance=%s settled_at=%s\n",
              r.passed ? "PASS" : "FAIL", r.id.c_str(), lvg::format_double(r.limit_u).c_str(),
              lvg::format_double(r.limit_v).c_str(), lvg::format_double(r.distance).c_str(),
              lvg::format_double(r.tolerance).c_str(),
              r.settled_at ? lvg::format_double(*r.settled_at).c_str() : "never");
  return r.passed ? Ok : Mismatch;
}

int sweep(const Overrides& o) {
  const lvg::RunConfig cfg = o.load();
  const lvg::SweepReport r = lvg::run_sweep(cfg, cfg.workers);
  std::printf("points,%zu\ndisagreements,%zu\nfailures,%zu\nwrote,%s\n", r.rows.size(),
              r.disagreements, r.failures, r.csv_path.string().c_str());
  if (r.failures > 0) return NumericalFailure;
  return r.disagreements > 0 ? Mismatch : Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-species competition on weighted graphs"};
  app.require_subcommand(1);
  Overrides o;

  auto* sim = app.add_subcommand("simulate", "integrate a config and write trajectory.csv");
  add_common(sim, o, true);
  auto* cls = app.add_subcommand("classify", "print the regime, margins and predicted limit");
  add_common(cls, o, true);
  auto* eig = app.add_subcommand("eigen", "smallest Dirichlet eigenpairs as CSV");
  add_common(eig, o, true);
  auto* std_ = app.add_subcommand("steady", "logistic states and coexistence bounds as CSV");
  add_common(std_, o, true);
  auto* rep = app.add_subcommand("reproduce", "run one built-in reproduction case");
  std::string id;
  rep->add_option("id", id, "case id, or 'all'")->required();
  add_common(rep, o, false);
  auto* swp = app.add_subcommand("sweep", "classify and simulate over a parameter grid");
  add_common(swp, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : ConfigError;
  }

  try {
    if (*sim) return simulate(o);
    if (*cls) {
      std::fputs(lvg::run_classify(o.load()).c_str(), stdout);
      return Ok;
    }
    if (*eig) {
      std::fputs(lvg::run_eigen(o.load()).c_str(), stdout);
      return Ok;
    }
    if (*std_) {
      std::fputs(lvg::run_steady(o.load()).c_str(), stdout);
      return Ok;
    }
    if (*rep) {
      if (id != "all") return reproduce(id, o);
      int worst = Ok;
      for (const auto& each : lvg::reproduction_ids()) {
        Overrides one = o;
        if (o.out) one.out = *o.out + "/" + each;
        worst = std::max(worst, reproduce(each, one));
      }
      return worst;
    }
    if (*swp) return sweep(o);
  } catch (const lvg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_config_error(e.code()) ? ConfigError : NumericalFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return NumericalFailure;
  }
  return Ok;
}
