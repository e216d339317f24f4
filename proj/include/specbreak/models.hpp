#pragma once

#include "specbreak/process_sim.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace specbreak::models {

// Bivariate models used in the simulation study, with ids "model-6.1" ... "model-6.5"
// and "model-4.4".

/// X_t = Z_t + [[theta, 0.2], [0.2, theta]] Z_{t-1}.
[[nodiscard]] PiecewiseLinearModel ma1(double theta);

/// X_t = [[phi, 0.2], [0.2, phi]] X_{t-1} + Z_t.
[[nodiscard]] PiecewiseVarModel var1(double phi);

/// Piecewise VAR(1) with [[phi_l, 0.1], [0.1, phi_l]] on segment l.
[[nodiscard]] PiecewiseVarModel switching_var1(std::vector<double> breaks, const std::vector<double>& phis);

/// Piecewise MA(1): X_t = Z_t + [[theta_l, 0.1], [0.1, theta_l]] Z_{t-1}.
[[nodiscard]] PiecewiseLinearModel switching_ma1(std::vector<double> breaks, const std::vector<double>& thetas);

/// Piecewise scaling: X_t = [[sigma_l, 0.2], [0.2, sigma_l]] Z_t.
[[nodiscard]] PiecewiseLinearModel switching_scale(std::vector<double> breaks, const std::vector<double>& sigmas);

/// Four-regime white noise with breaks at 1/4, 1/2, 3/4 affecting f_11, f_22 and f_12 in turn.
[[nodiscard]] PiecewiseLinearModel four_regime();

/**
 * Parses a number given either as a JSON number or as a string "p/q" or
 * decimal. Throws ConfigError otherwise.
 */
[[nodiscard]] double parse_rational(const nlohmann::json& value);

/**
 * Builds a model from a JSON description.
 *
 *   {"id": "model-6.5", "breaks": ["1/2"], "sigma": [1, 2]}
 *   {"id": "custom", "type": "ma" | "var", "dimension": 2,
 *    "breaks": [0.25], "segments": [[[[1,0],[0,1]]], [[[2,0],[0,1]]]]}
 *
 * Custom segments list coefficient matrices as row-major nested arrays.
 */
[[nodiscard]] ProcessModel from_json(const nlohmann::json& spec);

[[nodiscard]] nlohmann::json to_json(const ProcessModel& model);

}  // namespace specbreak::models
