#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/quasimode.hpp"
#include "carleman/singular_value.hpp"
#include "carleman/symbols.hpp"

namespace carleman {

struct GridConfig {
  double x_min = -0.3;
  double x_max = 0.3;
  int n = 601;
};

struct RayConfig {
  bool follow_violation = false;  // use the violation ray from find_violation
  VectorXd direction;             // tangential direction; defaults to e_1
  double ratio = 0.5;             // |xi'| / tau
};

struct QuasiModeConfig {
  double gamma = 10.0;
  double cutoff_radius = 0.05;
  std::vector<double> tau;
  QuadratureSpec quadrature;
};

struct RegionsConfig {
  double tau_min = 10, tau_max = 100;
  double xi_min = 0, xi_max = 100;
  int tau_points = 200, xi_points = 200;
  std::optional<double> sigma0;
};

struct EstimateConfig {
  std::vector<double> tau;
  int samples = 1000;
  int smoothing = 8;
};

struct FactorConfig {
  double lambda = 3.0;
  double gamma = 1.0;
  double length = 1.0;  // half-line truncated to [0, length]
  int nodes = 201;      // coarsest resolution
  int levels = 3;       // number of resolutions, each halving h
  int samples = 100;
};

struct ExperimentConfig {
  ModelCoefficients coefficients;
  double alpha_plus = 1, alpha_minus = 1;
  std::optional<double> beta;  // empty: "auto"
  GridConfig grid;
  std::vector<double> sweep_tau;
  RayConfig ray;
  QuasiModeConfig quasimode;
  RegionsConfig regions;
  SubellipticityConfig subellipticity;
  EstimateConfig estimate;
  FactorConfig factor;
  SingularValueOptions svd;
  std::uint64_t seed = 1;

  /// Weight with beta resolved ("auto" runs select_beta on the grid domain).
  WeightSpec weight() const;
};

/// Parses and validates; errors are ValidationError naming the JSON path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON: full matrices, explicit tau lists, every field present.
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace carleman
