#include "carleman/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "carleman/config.hpp"
#include "carleman/csv.hpp"
#include "carleman/estimate.hpp"
#include "carleman/parallel.hpp"
#include "carleman/sweep.hpp"

namespace carleman {

namespace {

using Cells = std::vector<CsvCell>;

struct Context {
  ExperimentConfig cfg;
  RunOptions opt;
  std::ostream& log;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(opt.out_dir) / (name + ".csv")).string();
  }
};

struct Ray {
  VectorXd direction;
  double ratio;
};

Ray resolve_ray(const ExperimentConfig& cfg, const WeightSpec& w) {
  if (!cfg.ray.follow_violation) return {cfg.ray.direction.normalized(), cfg.ray.ratio};
  const auto v = find_violation(cfg.coefficients, w);
  if (!v) throw ValidationError("ray.follow_violation", "the weight condition holds; there is no violation ray");
  return {v->xi0.normalized(), v->xi0.norm() / v->tau0};
}

const std::vector<double>& require_taus(const std::vector<double>& primary,
                                        const std::vector<double>& fallback, const char* field) {
  const auto& taus = primary.empty() ? fallback : primary;
  if (taus.empty()) throw ValidationError(field, "no tau values given");
  return taus;
}

void write_fit(const Context& ctx, const std::string& name, const LinearFit& fit) {
  CsvTable t({"slope", "intercept", "r2"});
  t.add_row({fit.slope, fit.intercept, fit.r2});
  t.write_file(ctx.path(name + "-fit"));
}

int check_condition_cmd(const Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const WeightSpec w{c.alpha_plus, c.alpha_minus, c.beta.value_or(0.0)};
  const ConditionReport r = check_condition(c.coefficients, w);
  std::vector<std::string> header = {"satisfied", "alpha_ratio", "sup_ratio", "sigma", "sigma0"};
  for (Eigen::Index k = 0; k < r.witness.size(); ++k) header.push_back("witness_" + std::to_string(k + 1));
  CsvTable t(header);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Cells row = {r.satisfied, r.alpha_ratio, r.sup_ratio, r.sigma.value_or(nan),
               r.sigma ? default_sigma0(*r.sigma) : nan};
  for (Eigen::Index k = 0; k < r.witness.size(); ++k) row.push_back(r.witness(k));
  t.add_row(row);
  t.write_file(ctx.path("check-condition"));
  ctx.log << "condition " << (r.satisfied ? "satisfied" : "violated") << ", sup m+/m- = " << r.sup_ratio
          << "\n";
  return kExitOk;
}

int regions_cmd(const Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const WeightSpec w{c.alpha_plus, c.alpha_minus, c.beta.value_or(0.0)};
  const ConditionReport r = check_condition(c.coefficients, w);
  if (!r.satisfied) throw ValidationError("weight", "regions need alpha+/alpha- > sup m+/m-");
  const double sigma = *r.sigma;
  const double sigma0 = c.regions.sigma0.value_or(default_sigma0(sigma));
  if (!(sigma0 > 1.0 && sigma0 < sigma)) throw ValidationError("regions.sigma0", "need 1 < sigma0 < sigma");
  const ReducedCoefficients rp = reduce_coefficients(c.coefficients.a_plus);
  const ReducedCoefficients rm = reduce_coefficients(c.coefficients.a_minus);
  const VectorXd dir = c.ray.direction.normalized();
  const RegionsConfig& g = c.regions;
  CsvTable t({"tau", "xi_abs", "region", "f_plus", "f_minus"});
  long failures = 0;
  for (int i = 0; i < g.tau_points; ++i) {
    const double tau = g.tau_points == 1 ? g.tau_min : g.tau_min + (g.tau_max - g.tau_min) * i / (g.tau_points - 1);
    for (int k = 0; k < g.xi_points; ++k) {
      const double xi = g.xi_points == 1 ? g.xi_min : g.xi_min + (g.xi_max - g.xi_min) * k / (g.xi_points - 1);
      const TangentialFrequency f(tau, VectorXd(xi * dir));
      const SymbolValues s = symbol_values(rp, rm, w, f, 0.0);
      std::string label;
      try {
        label = to_string(classify_region(rp, w, f, sigma0, sigma));
      } catch (const CoverFailure&) {
        label = "none";
        ++failures;
      }
      t.add_row({tau, xi, label, s.f_plus, s.f_minus});
    }
  }
  t.write_file(ctx.path("regions"));
  if (failures > 0) {
    ctx.log << "regions: " << failures << " grid points outside both cones\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int subellipticity_cmd(const Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const WeightSpec w = c.weight();
  CsvTable t({"side", "beta", "passed", "weight_positive", "min_margin", "samples_in_set", "violations"});
  bool all = true;
  for (bool plus : {false, true}) {
    const ReducedCoefficients red = reduce_coefficients(plus ? c.coefficients.a_plus : c.coefficients.a_minus);
    const SubellipticityScan s = scan_subellipticity(red, plus, w, c.grid.x_min, c.grid.x_max, c.subellipticity);
    all = all && s.passed && s.weight_positive;
    t.add_row({std::string(plus ? "plus" : "minus"), w.beta, s.passed, s.weight_positive, s.min_margin,
               static_cast<std::int64_t>(s.samples_in_set), static_cast<std::int64_t>(s.violations)});
  }
  t.write_file(ctx.path("subellipticity"));
  ctx.log << "sub-ellipticity " << (all ? "passed" : "failed") << " with beta = " << w.beta << "\n";
  return kExitOk;
}

int sweep_cmd(const Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const WeightSpec w = c.weight();
  const Ray ray = resolve_ray(c, w);
  const auto& taus = require_taus(c.sweep_tau, {}, "sweep.tau");
  const Grid1D grid = make_grid(c.grid.x_min, c.grid.x_max, c.grid.n);
  SweepOptions so;
  so.threads = ctx.opt.threads;
  so.svd = c.svd;
  so.svd.seed = c.seed;
  const SweepResult res = carleman_sweep(c.coefficients, w, ray.direction, ray.ratio, taus, grid, so);
  CsvTable t({"tau", "xi_abs", "sigma_min", "sigma_over_tau32", "N", "h", "mode"});
  for (const auto& r : res.rows) {
    t.add_row({r.tau, r.xi_abs, r.sigma_min, r.sigma_over_tau32, static_cast<std::int64_t>(r.n), r.h,
               std::string(to_string(r.mode))});
  }
  t.write_file(ctx.path("sweep-carleman"));
  write_fit(ctx, "sweep-carleman", res.fit);
  ctx.log << "log-log slope of sigma_min: " << res.fit.slope << "\n";
  return kExitOk;
}

int quasimode_cmd(const Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const WeightSpec w = c.weight();
  const auto v = find_violation(c.coefficients, w);
  if (!v) throw ValidationError("weight", "the weight condition holds; no quasi-mode exists");
  QuasiModeSpec spec{*v, c.quasimode.gamma, c.quasimode.cutoff_radius};
  const auto& taus = require_taus(c.quasimode.tau, c.sweep_tau, "quasimode.tau");
  const QuasiModeSweep res = quasimode_norms(spec, c.coefficients, w, taus, c.quasimode.quadrature, ctx.opt.threads);
  CsvTable t({"tau", "norm_residual", "norm_u", "ratio", "lower_bound_u2", "upper_bound_residual2"});
  for (const auto& r : res.rows) {
    t.add_row({r.tau, r.norm_residual, r.norm_u, r.ratio, r.lower_bound_u2, r.upper_bound_residual2});
  }
  t.write_file(ctx.path("quasimode"));
  write_fit(ctx, "quasimode", res.fit);
  ctx.log << "log(ratio) slope in tau: " << res.fit.slope << ", r2 = " << res.fit.r2 << "\n";
  return kExitOk;
}

int factor_cmd(const Context& ctx) {
  const FactorConfig& f = ctx.cfg.factor;
  CsvTable t({"level", "h", "sign", "max_identity_residual", "min_slack", "observed_order"});
  for (int sign : {1, -1}) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level < f.levels; ++level) {
      const int nodes = (f.nodes - 1) * (1 << level) + 1;
      const double h = f.length / (nodes - 1);
      double worst = 0, slack = std::numeric_limits<double>::infinity();
      for (int s = 0; s < f.samples; ++s) {
        const RandomHalfLineFunction fn(ctx.cfg.seed + static_cast<std::uint64_t>(s), f.length);
        const HalfLineCheck chk = halfline_factor_check(f.lambda, f.gamma, sign, fn.sample(nodes), h);
        worst = std::max(worst, chk.identity_residual);
        slack = std::min(slack, chk.slack);
      }
      const double order = level == 0 ? std::numeric_limits<double>::quiet_NaN() : std::log2(prev / worst);
      t.add_row({static_cast<std::int64_t>(level), h, static_cast<std::int64_t>(sign), worst, slack, order});
      prev = worst;
    }
  }
  t.write_file(ctx.path("factor-estimates"));
  return kExitOk;
}

int estimate_cmd(const Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const WeightSpec w = c.weight();
  const Ray ray = resolve_ray(c, w);
  const auto& taus = require_taus(c.estimate.tau, c.sweep_tau, "estimate.tau");
  std::vector<double> sorted = taus;
  std::sort(sorted.begin(), sorted.end());
  const Grid1D grid = make_grid(c.grid.x_min, c.grid.x_max, c.grid.n);
  struct Row {
    double xi = 0, lo = 0, mean = 0, hi = 0;
  };
  std::vector<Row> rows(sorted.size());
  parallel_for(sorted.size(), ctx.opt.threads, [&](std::size_t i) {
    const double tau = sorted[i];
    const TangentialFrequency f(tau, VectorXd(ray.ratio * tau * ray.direction));
    const AssembledOperator op = assemble(c.coefficients, w, f, grid);
    Row r;
    r.xi = f.xi_norm();
    r.lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < c.estimate.samples; ++s) {
      const InterfaceFunction v = random_admissible_v(op, c.seed + static_cast<std::uint64_t>(s), c.estimate.smoothing);
      const double ratio = estimate_sides(op, v).ratio;
      r.lo = std::min(r.lo, ratio);
      r.hi = std::max(r.hi, ratio);
      r.mean += ratio / c.estimate.samples;
    }
    rows[i] = r;
  });
  CsvTable t({"tau", "xi_abs", "samples", "min_ratio", "mean_ratio", "max_ratio"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.add_row({sorted[i], rows[i].xi, static_cast<std::int64_t>(c.estimate.samples), rows[i].lo, rows[i].mean,
               rows[i].hi});
  }
  t.write_file(ctx.path("estimate-ratio"));
  return kExitOk;
}

using Handler = int (*)(const Context&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> table = {
      {"check-condition", check_condition_cmd}, {"regions", regions_cmd},
      {"subellipticity", subellipticity_cmd},   {"sweep-carleman", sweep_cmd},
      {"quasimode", quasimode_cmd},             {"factor-estimates", factor_cmd},
      {"estimate-ratio", estimate_cmd},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : handlers()) out.push_back(name);
    return out;
  }();
  return names;
}

int run(const RunOptions& options, std::ostream& log) {
  try {
    Handler handler = nullptr;
    for (const auto& [name, fn] : handlers()) {
      if (name == options.subcommand) handler = fn;
    }
    if (!handler) throw ValidationError("subcommand", "unknown subcommand " + options.subcommand);
    if (options.threads < 1) throw ValidationError("threads", "must be >= 1");
    ExperimentConfig cfg = load_config(options.config_path);
    if (options.seed) cfg.seed = *options.seed;
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw ValidationError("out", "cannot create " + options.out_dir + ": " + ec.message());
    return handler(Context{std::move(cfg), options, log});
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    log << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const CoverFailure& e) {
    log << "error: cover: " << e.what() << "\n";
    return kExitNonConvergence;
  }
}

}  // namespace carleman
