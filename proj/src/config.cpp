#include "carleman/config.hpp"

#include <cmath>
#include <fstream>

#include "carleman/discrete.hpp"

namespace carleman {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path, what);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

// Reads j[key] into `out` when present.
template <typename T, typename F>
void optional_field(const json& j, const std::string& parent, const char* key, T& out, F read) {
  if (!j.contains(key)) return;
  out = read(j.at(key), parent + "." + key);
}

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) fail(path + "." + k, "unknown field");
  }
}

// A side is either a full matrix or a vector of diagonal entries.
MatrixXd side_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a matrix or a diagonal vector");
  if (!j[0].is_array()) {
    const std::vector<double> d = numbers(j, path);
    return Eigen::Map<const VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal();
  }
  const auto n = static_cast<Eigen::Index>(j.size());
  MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string row = path + "[" + std::to_string(r) + "]";
    const std::vector<double> v = numbers(j[r], row);
    if (static_cast<Eigen::Index>(v.size()) != n) fail(row, "matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = v[c];
  }
  return m;
}

std::vector<double> tau_list(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    out = numbers(j, path);
  } else {
    check_object(j, path, {"min", "max", "count"});
    for (const char* k : {"min", "max", "count"}) {
      if (!j.contains(k)) fail(path + "." + k, "missing");
    }
    const double lo = number(j["min"], path + ".min");
    const double hi = number(j["max"], path + ".max");
    const int count = integer(j["count"], path + ".count");
    if (!(lo > 0.0) || !(hi >= lo)) fail(path, "need 0 < min <= max");
    if (count < 1) fail(path + ".count", "must be >= 1");
    for (int k = 0; k < count; ++k) {
      out.push_back(count == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(out[k] > 0.0)) fail(path + "[" + std::to_string(k) + "]", "must be positive");
  }
  return out;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

const char* svd_name(SvdMethod m) {
  switch (m) {
    case SvdMethod::Dense: return "dense";
    case SvdMethod::InverseIteration: return "inverse_iteration";
    default: return "auto";
  }
}

}  // namespace

WeightSpec ExperimentConfig::weight() const {
  WeightSpec w{alpha_plus, alpha_minus, 0.0};
  w.beta = beta ? *beta
                : select_beta(coefficients, alpha_plus, alpha_minus, grid.x_min, grid.x_max,
                              subellipticity);
  return w;
}

ExperimentConfig parse_config(const json& j) {
  check_object(j, "config", {"coefficients", "weight", "grid", "sweep", "ray", "quasimode", "regions",
                             "subellipticity", "estimate", "factor", "svd", "seed"});
  ExperimentConfig c;

  if (!j.contains("coefficients")) fail("coefficients", "missing");
  const json& co = j["coefficients"];
  check_object(co, "coefficients", {"plus", "minus"});
  if (!co.contains("plus")) fail("coefficients.plus", "missing");
  if (!co.contains("minus")) fail("coefficients.minus", "missing");
  c.coefficients.a_plus = side_matrix(co["plus"], "coefficients.plus");
  c.coefficients.a_minus = side_matrix(co["minus"], "coefficients.minus");
  if (c.coefficients.a_plus.rows() != c.coefficients.a_minus.rows()) {
    fail("coefficients.minus", "dimension differs from coefficients.plus");
  }
  c.coefficients.validate();
  const int tdim = c.coefficients.dimension() - 1;

  if (!j.contains("weight")) fail("weight", "missing");
  const json& w = j["weight"];
  check_object(w, "weight", {"alpha_plus", "alpha_minus", "beta"});
  if (!w.contains("alpha_plus")) fail("weight.alpha_plus", "missing");
  if (!w.contains("alpha_minus")) fail("weight.alpha_minus", "missing");
  c.alpha_plus = number(w["alpha_plus"], "weight.alpha_plus");
  c.alpha_minus = number(w["alpha_minus"], "weight.alpha_minus");
  if (w.contains("beta") && !(w["beta"].is_string() && w["beta"] == "auto")) {
    c.beta = number(w["beta"], "weight.beta");
  }
  WeightSpec{c.alpha_plus, c.alpha_minus, c.beta.value_or(0.0)}.validate();

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_object(g, "grid", {"x_min", "x_max", "n"});
    optional_field(g, "grid", "x_min", c.grid.x_min, number);
    optional_field(g, "grid", "x_max", c.grid.x_max, number);
    optional_field(g, "grid", "n", c.grid.n, integer);
  }
  make_grid(c.grid.x_min, c.grid.x_max, c.grid.n);

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_object(s, "sweep", {"tau"});
    optional_field(s, "sweep", "tau", c.sweep_tau, tau_list);
  }

  c.ray.direction = VectorXd::Unit(tdim, 0);
  if (j.contains("ray")) {
    const json& r = j["ray"];
    check_object(r, "ray", {"follow_violation", "direction", "ratio"});
    if (r.contains("follow_violation")) {
      if (!r["follow_violation"].is_boolean()) fail("ray.follow_violation", "expected a boolean");
      c.ray.follow_violation = r["follow_violation"].get<bool>();
    }
    if (r.contains("direction")) {
      const std::vector<double> d = numbers(r["direction"], "ray.direction");
      if (static_cast<int>(d.size()) != tdim) fail("ray.direction", "needs n - 1 entries");
      c.ray.direction = Eigen::Map<const VectorXd>(d.data(), tdim);
      if (!(c.ray.direction.norm() > 0.0)) fail("ray.direction", "must be nonzero");
    }
    optional_field(r, "ray", "ratio", c.ray.ratio, number);
    if (!(c.ray.ratio >= 0.0)) fail("ray.ratio", "must be nonnegative");
  }

  if (j.contains("quasimode")) {
    const json& q = j["quasimode"];
    check_object(q, "quasimode", {"gamma", "cutoff_radius", "tau", "xi_nodes", "xn_nodes",
                                  "panel_nodes", "check_convergence"});
    optional_field(q, "quasimode", "gamma", c.quasimode.gamma, number);
    optional_field(q, "quasimode", "cutoff_radius", c.quasimode.cutoff_radius, number);
    optional_field(q, "quasimode", "tau", c.quasimode.tau, tau_list);
    optional_field(q, "quasimode", "xi_nodes", c.quasimode.quadrature.xi_nodes, integer);
    optional_field(q, "quasimode", "xn_nodes", c.quasimode.quadrature.xn_nodes, integer);
    optional_field(q, "quasimode", "panel_nodes", c.quasimode.quadrature.panel_nodes, integer);
    if (q.contains("check_convergence")) {
      if (!q["check_convergence"].is_boolean()) fail("quasimode.check_convergence", "expected a boolean");
      c.quasimode.quadrature.check_convergence = q["check_convergence"].get<bool>();
    }
  }
  if (!(c.quasimode.gamma >= 1.0)) fail("quasimode.gamma", "must be >= 1");
  if (!(c.quasimode.cutoff_radius > 0.0 && c.quasimode.cutoff_radius < 1.0)) {
    fail("quasimode.cutoff_radius", "must lie in (0, 1)");
  }
  if (c.quasimode.quadrature.xi_nodes < 1) fail("quasimode.xi_nodes", "must be >= 1");
  if (c.quasimode.quadrature.xn_nodes < 1) fail("quasimode.xn_nodes", "must be >= 1");
  if (c.quasimode.quadrature.panel_nodes < 1) fail("quasimode.panel_nodes", "must be >= 1");

  if (j.contains("regions")) {
    const json& r = j["regions"];
    check_object(r, "regions", {"tau_min", "tau_max", "xi_min", "xi_max", "tau_points", "xi_points", "sigma0"});
    optional_field(r, "regions", "tau_min", c.regions.tau_min, number);
    optional_field(r, "regions", "tau_max", c.regions.tau_max, number);
    optional_field(r, "regions", "xi_min", c.regions.xi_min, number);
    optional_field(r, "regions", "xi_max", c.regions.xi_max, number);
    optional_field(r, "regions", "tau_points", c.regions.tau_points, integer);
    optional_field(r, "regions", "xi_points", c.regions.xi_points, integer);
    if (r.contains("sigma0")) c.regions.sigma0 = number(r["sigma0"], "regions.sigma0");
  }
  if (!(c.regions.tau_min > 0.0 && c.regions.tau_max >= c.regions.tau_min)) {
    fail("regions.tau_min", "need 0 < tau_min <= tau_max");
  }
  if (!(c.regions.xi_min >= 0.0 && c.regions.xi_max >= c.regions.xi_min)) {
    fail("regions.xi_min", "need 0 <= xi_min <= xi_max");
  }
  if (c.regions.tau_points < 1) fail("regions.tau_points", "must be >= 1");
  if (c.regions.xi_points < 1) fail("regions.xi_points", "must be >= 1");

  if (j.contains("subellipticity")) {
    const json& s = j["subellipticity"];
    check_object(s, "subellipticity", {"delta", "c_prime", "ratio_bound", "char_tolerance"});
    optional_field(s, "subellipticity", "delta", c.subellipticity.delta, number);
    optional_field(s, "subellipticity", "c_prime", c.subellipticity.c_prime, number);
    optional_field(s, "subellipticity", "ratio_bound", c.subellipticity.ratio_bound, number);
    optional_field(s, "subellipticity", "char_tolerance", c.subellipticity.char_tolerance, number);
  }
  if (!(c.subellipticity.delta > 0.0)) fail("subellipticity.delta", "must be positive");

  if (j.contains("estimate")) {
    const json& e = j["estimate"];
    check_object(e, "estimate", {"tau", "samples", "smoothing"});
    optional_field(e, "estimate", "tau", c.estimate.tau, tau_list);
    optional_field(e, "estimate", "samples", c.estimate.samples, integer);
    optional_field(e, "estimate", "smoothing", c.estimate.smoothing, integer);
  }
  if (c.estimate.samples < 1) fail("estimate.samples", "must be >= 1");
  if (c.estimate.smoothing < 0) fail("estimate.smoothing", "must be >= 0");

  if (j.contains("factor")) {
    const json& f = j["factor"];
    check_object(f, "factor", {"lambda", "gamma", "length", "nodes", "levels", "samples"});
    optional_field(f, "factor", "lambda", c.factor.lambda, number);
    optional_field(f, "factor", "gamma", c.factor.gamma, number);
    optional_field(f, "factor", "length", c.factor.length, number);
    optional_field(f, "factor", "nodes", c.factor.nodes, integer);
    optional_field(f, "factor", "levels", c.factor.levels, integer);
    optional_field(f, "factor", "samples", c.factor.samples, integer);
  }
  if (!(c.factor.lambda > 0.0)) fail("factor.lambda", "must be positive");
  if (!(c.factor.gamma >= 0.0)) fail("factor.gamma", "must be nonnegative");
  if (!(c.factor.length > 0.0)) fail("factor.length", "must be positive");
  if (c.factor.nodes < 16) fail("factor.nodes", "must be >= 16");
  if (c.factor.levels < 2) fail("factor.levels", "must be >= 2");
  if (c.factor.samples < 1) fail("factor.samples", "must be >= 1");

  if (j.contains("svd")) {
    const json& s = j["svd"];
    check_object(s, "svd", {"method", "dense_limit", "tolerance", "max_iterations"});
    if (s.contains("method")) {
      const std::string m = s["method"].is_string() ? s["method"].get<std::string>() : "";
      if (m == "auto") c.svd.method = SvdMethod::Auto;
      else if (m == "dense") c.svd.method = SvdMethod::Dense;
      else if (m == "inverse_iteration") c.svd.method = SvdMethod::InverseIteration;
      else fail("svd.method", "expected auto, dense or inverse_iteration");
    }
    optional_field(s, "svd", "dense_limit", c.svd.dense_limit, integer);
    optional_field(s, "svd", "tolerance", c.svd.tolerance, number);
    optional_field(s, "svd", "max_iterations", c.svd.max_iterations, integer);
  }
  if (!(c.svd.tolerance > 0.0)) fail("svd.tolerance", "must be positive");
  if (c.svd.max_iterations < 1) fail("svd.max_iterations", "must be >= 1");

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["coefficients"] = {{"plus", matrix_json(c.coefficients.a_plus)},
                       {"minus", matrix_json(c.coefficients.a_minus)}};
  j["weight"] = {{"alpha_plus", c.alpha_plus}, {"alpha_minus", c.alpha_minus}};
  j["weight"]["beta"] = c.beta ? json(*c.beta) : json("auto");
  j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"n", c.grid.n}};
  j["sweep"] = {{"tau", c.sweep_tau}};
  j["ray"] = {{"follow_violation", c.ray.follow_violation},
              {"direction", vector_json(c.ray.direction)},
              {"ratio", c.ray.ratio}};
  j["quasimode"] = {{"gamma", c.quasimode.gamma},
                    {"cutoff_radius", c.quasimode.cutoff_radius},
                    {"tau", c.quasimode.tau},
                    {"xi_nodes", c.quasimode.quadrature.xi_nodes},
                    {"xn_nodes", c.quasimode.quadrature.xn_nodes},
                    {"panel_nodes", c.quasimode.quadrature.panel_nodes},
                    {"check_convergence", c.quasimode.quadrature.check_convergence}};
  j["regions"] = {{"tau_min", c.regions.tau_min}, {"tau_max", c.regions.tau_max},
                  {"xi_min", c.regions.xi_min},   {"xi_max", c.regions.xi_max},
                  {"tau_points", c.regions.tau_points}, {"xi_points", c.regions.xi_points}};
  if (c.regions.sigma0) j["regions"]["sigma0"] = *c.regions.sigma0;
  j["subellipticity"] = {{"delta", c.subellipticity.delta},
                         {"c_prime", c.subellipticity.c_prime},
                         {"ratio_bound", c.subellipticity.ratio_bound},
                         {"char_tolerance", c.subellipticity.char_tolerance}};
  j["estimate"] = {{"tau", c.estimate.tau}, {"samples", c.estimate.samples},
                   {"smoothing", c.estimate.smoothing}};
  j["factor"] = {{"lambda", c.factor.lambda}, {"gamma", c.factor.gamma},
                 {"length", c.factor.length}, {"nodes", c.factor.nodes},
                 {"levels", c.factor.levels}, {"samples", c.factor.samples}};
  j["svd"] = {{"method", svd_name(c.svd.method)},
              {"dense_limit", c.svd.dense_limit},
              {"tolerance", c.svd.tolerance},
              {"max_iterations", c.svd.max_iterations}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace carleman
