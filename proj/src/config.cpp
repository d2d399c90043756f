#include "lvgraph/config.hpp"

#include "lvgraph/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lvg {

using nlohmann::json;

double SweepAxis::value(std::size_t i) const {
  if (count <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::size_t SweepSpec::points() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.count;
  return n;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::ConfigInvalid, what); }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) invalid(where + " must be a number");
  return j.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), key);
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) invalid(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, where));
  return out;
}

std::vector<std::string> names(const json& j, const std::string& where) {
  if (!j.is_array()) invalid(where + " must be an array of names");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) invalid(where + " entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

/// number: constant on the vertices that carry state for this bc; array:
/// per vertex; object: by name. Unset entries stay NaN.
Field parse_initial(const json& j, const RunConfig& cfg, const std::string& where) {
  const auto n = static_cast<Eigen::Index>(cfg.vertices.size());
  Field f = Field::Constant(n, std::numeric_limits<double>::quiet_NaN());
  if (j.is_number()) {
    // Boundary entries stay unset; the boundary condition fills them.
    std::vector<bool> inner(static_cast<std::size_t>(n), cfg.bc == BoundaryCondition::NoBoundary);
    if (cfg.interior) {
      for (const auto& name : *cfg.interior) {
        for (std::size_t i = 0; i < cfg.vertices.size(); ++i) {
          if (cfg.vertices[i] == name) inner[i] = true;
        }
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (inner[static_cast<std::size_t>(i)]) f(i) = j.get<double>();
    }
  } else if (j.is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != n) {
      invalid(where + " must list one value per vertex");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& e = j[static_cast<std::size_t>(i)];
      if (!e.is_null()) f(i) = number(e, where);
    }
  } else if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      bool found = false;
      for (std::size_t i = 0; i < cfg.vertices.size(); ++i) {
        if (cfg.vertices[i] == key) {
          f(static_cast<Eigen::Index>(i)) = number(val, where);
          found = true;
        }
      }
      if (!found) invalid(where + " names unknown vertex '" + key + "'");
    }
  } else {
    invalid(where + " must be a number, an array or an object");
  }
  return f;
}

}  // namespace

Problem RunConfig::make_problem() const { return make_problem(params); }

Problem RunConfig::make_problem(const CompetitionParams& p) const {
  WeightedGraph g = build_graph(vertices, weights_1, weights_2, measure_1, measure_2);
  std::optional<DomainPartition> part;
  if (bc != BoundaryCondition::NoBoundary) {
    if (!interior) fail(ErrorCode::ConfigInvalid, "bc needs graph.interior");
    part = boundary_of(g, *interior);
  }
  return Problem(std::move(g), std::move(part), p, bc);
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) invalid("top level must be an object");

  RunConfig cfg;
  try {
    if (!root.contains("graph")) invalid("missing graph");
    const json& g = root.at("graph");
    cfg.vertices = names(g.at("vertices"), "graph.vertices");
    if (!g.at("edges").is_array()) invalid("graph.edges must be an array");
    for (const auto& e : g.at("edges")) {
      if (!e.is_array() || e.size() < 2 || e.size() > 4 || !e[0].is_string() ||
          !e[1].is_string()) {
        invalid("each edge is [a, b, w1, w2?]");
      }
      const double w1 = e.size() > 2 ? number(e[2], "edge weight") : 1.0;
      const double w2 = e.size() > 3 ? number(e[3], "edge weight") : w1;
      cfg.weights_1.push_back({e[0].get<std::string>(), e[1].get<std::string>(), w1});
      cfg.weights_2.push_back({e[0].get<std::string>(), e[1].get<std::string>(), w2});
    }
    if (g.contains("measures")) {
      const json& m = g.at("measures");
      if (m.contains("1")) cfg.measure_1 = numbers(m.at("1"), "graph.measures.1");
      if (m.contains("2")) cfg.measure_2 = numbers(m.at("2"), "graph.measures.2");
    }
    if (g.contains("interior")) cfg.interior = names(g.at("interior"), "graph.interior");

    const std::string bc = root.value("bc", std::string("none"));
    if (bc == "none") {
      cfg.bc = BoundaryCondition::NoBoundary;
    } else if (bc == "neumann") {
      cfg.bc = BoundaryCondition::Neumann;
    } else if (bc == "dirichlet") {
      cfg.bc = BoundaryCondition::Dirichlet;
    } else {
      invalid("bc must be none, neumann or dirichlet");
    }
    if (cfg.bc == BoundaryCondition::NoBoundary && cfg.interior) {
      invalid("graph.interior given but bc is none");
    }

    if (!root.contains("params")) invalid("missing params");
    const json& p = root.at("params");
    auto need = [&](const char* key) {
      if (!p.contains(key)) invalid(std::string("params.") + key + " missing");
      return number(p.at(key), std::string("params.") + key);
    };
    cfg.params = {need("a1"), need("b1"), need("c1"), need("a2"),
                  need("b2"), need("c2"), need("d1"), need("d2")};

    if (root.contains("initial")) {
      const json& ini = root.at("initial");
      if (!ini.contains("u") || !ini.contains("v")) invalid("initial needs u and v");
      cfg.initial.u = parse_initial(ini.at("u"), cfg, "initial.u");
      cfg.initial.v = parse_initial(ini.at("v"), cfg, "initial.v");
    } else {
      cfg.initial.u = parse_initial(json(1.0), cfg, "initial.u");
      cfg.initial.v = parse_initial(json(1.0), cfg, "initial.v");
    }

    cfg.t_end = number_or(root, "t_end", cfg.t_end);
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) invalid("t_end must be positive");
    cfg.step.dt = number_or(root, "dt", 0.0);
    if (cfg.step.dt < 0.0) invalid("dt must be nonnegative");
    cfg.tol = number_or(root, "tol", cfg.tol);
    if (!(cfg.tol > 0.0)) invalid("tol must be positive");
    cfg.out = root.value("out", cfg.out);
    cfg.workers = root.value("workers", 1);
    if (cfg.workers < 1) invalid("workers must be at least 1");

    if (root.contains("samples")) {
      const json& s = root.at("samples");
      cfg.samples.first = number_or(s, "first", cfg.samples.first);
      cfg.samples.ratio = number_or(s, "ratio", cfg.samples.ratio);
      cfg.samples.uniform = number_or(s, "uniform", cfg.samples.uniform);
      if (s.contains("forced")) cfg.samples.forced = numbers(s.at("forced"), "samples.forced");
      if (cfg.samples.uniform <= 0.0 && (cfg.samples.first <= 0.0 || cfg.samples.ratio <= 1.0)) {
        invalid("samples need first > 0 and ratio > 1, or uniform > 0");
      }
    }

    if (root.contains("sweep")) {
      const json& s = root.at("sweep");
      SweepSpec spec;
      spec.max_points = s.value("max_points", spec.max_points);
      if (!s.contains("axes") || !s.at("axes").is_object()) invalid("sweep.axes must be an object");
      static const char* known[] = {"a1", "b1", "c1", "a2", "b2", "c2", "d1", "d2"};
      for (const auto& [key, val] : s.at("axes").items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
          invalid("sweep axis '" + key + "' is not a parameter");
        }
        if (!val.is_array() || val.size() != 3) invalid("sweep axis is [lo, hi, count]");
        SweepAxis ax{key, number(val[0], key), number(val[1], key), 0};
        if (!val[2].is_number_integer() || val[2].get<long long>() < 1) {
          invalid("sweep axis count must be a positive integer");
        }
        ax.count = val[2].get<std::size_t>();
        spec.axes.push_back(ax);
      }
      cfg.sweep = spec;
    }
  } catch (const json::exception& e) {
    invalid(std::string("malformed config: ") + e.what());
  }

  // Build once so graph, parameter and initial-data errors surface here.
  try {
    const Problem problem = cfg.make_problem();
    (void)prepare_initial(problem, cfg.initial);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    invalid(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace lvg
