#include "specbreak/models.hpp"

#include <cmath>
#include <numbers>

namespace specbreak::models {

namespace {

Eigen::MatrixXd symmetric2(double diagonal, double off) {
  Eigen::MatrixXd m(2, 2);
  m << diagonal, off, off, diagonal;
  return m;
}

void check_counts(const std::vector<double>& breaks, std::size_t parameters, const char* what) {
  if (parameters != breaks.size() + 1) {
    throw ConfigError(std::string(what) + " needs one value per segment (breaks + 1)");
  }
}

std::vector<double> number_list(const nlohmann::json& spec, const char* key,
                                std::vector<double> fallback) {
  if (!spec.contains(key)) return fallback;
  const auto& node = spec.at(key);
  std::vector<double> out;
  if (node.is_array()) {
    for (const auto& v : node) out.push_back(parse_rational(v));
  } else {
    out.push_back(parse_rational(node));
  }
  return out;
}

double number(const nlohmann::json& spec, const char* key, double fallback) {
  if (!spec.contains(key)) return fallback;
  const auto& node = spec.at(key);
  if (node.is_array()) {
    if (node.size() != 1) throw ConfigError(std::string("\"") + key + "\" takes a single value for a stationary model");
    return parse_rational(node.at(0));
  }
  return parse_rational(node);
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, Index d) {
  if (!rows.is_array() || Index(rows.size()) != d) {
    throw ConfigError("coefficient matrix must have " + std::to_string(d) + " rows");
  }
  Eigen::MatrixXd m(d, d);
  for (Index r = 0; r < d; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || Index(row.size()) != d) {
      throw ConfigError("coefficient matrix rows must have " + std::to_string(d) + " entries");
    }
    for (Index c = 0; c < d; ++c) m(r, c) = parse_rational(row[c]);
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

PiecewiseLinearModel ma1(double theta) {
  return {2, {}, {{Eigen::MatrixXd::Identity(2, 2), symmetric2(theta, 0.2)}}, "model-6.1"};
}

PiecewiseVarModel var1(double phi) { return {2, {}, {{symmetric2(phi, 0.2)}}, "model-6.2"}; }

PiecewiseVarModel switching_var1(std::vector<double> breaks, const std::vector<double>& phis) {
  check_counts(breaks, phis.size(), "Phi");
  PiecewiseVarModel model{2, std::move(breaks), {}, "model-6.3"};
  for (double phi : phis) model.segments.push_back({symmetric2(phi, 0.1)});
  model.validate();
  return model;
}

PiecewiseLinearModel switching_ma1(std::vector<double> breaks, const std::vector<double>& thetas) {
  check_counts(breaks, thetas.size(), "Theta");
  PiecewiseLinearModel model{2, std::move(breaks), {}, "model-6.4"};
  for (double theta : thetas) {
    model.segments.push_back({Eigen::MatrixXd::Identity(2, 2), symmetric2(theta, 0.1)});
  }
  model.validate();
  return model;
}

PiecewiseLinearModel switching_scale(std::vector<double> breaks, const std::vector<double>& sigmas) {
  check_counts(breaks, sigmas.size(), "Sigma");
  PiecewiseLinearModel model{2, std::move(breaks), {}, "model-6.5"};
  for (double sigma : sigmas) model.segments.push_back({symmetric2(sigma, 0.2)});
  model.validate();
  return model;
}

PiecewiseLinearModel four_regime() {
  const double r2 = std::numbers::sqrt2;
  Eigen::MatrixXd theta1 = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd theta2(2, 2), theta3(2, 2), theta4(2, 2);
  theta2 << 2, 0, 0, 1;
  theta3 << 2, 0, 0, 2;
  theta4 << r2, r2, 0, 2;
  return {2, {0.25, 0.5, 0.75}, {{theta1}, {theta2}, {theta3}, {theta4}}, "model-4.4"};
}

double parse_rational(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw ConfigError("expected a number or a \"p/q\" string");
  const auto text = value.get<std::string>();
  try {
    std::size_t used = 0;
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(text);
      const auto rest = text.substr(slash + 1);
      const double den = std::stod(rest, &used);
      if (used != rest.size() || den == 0.0) throw std::invalid_argument(text);
      return num / den;
    }
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + text + "'");
  }
}

ProcessModel from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("model description must be a JSON object");
  const auto id = spec.value("id", std::string("custom"));
  const auto breaks = number_list(spec, "breaks", {});
  if (id == "model-6.1") {
    if (!breaks.empty()) throw ConfigError("model-6.1 is stationary; use model-6.4 for breaks");
    return ma1(number(spec, "theta", 0.5));
  }
  if (id == "model-6.2") {
    if (!breaks.empty()) throw ConfigError("model-6.2 is stationary; use model-6.3 for breaks");
    auto model = var1(number(spec, "phi", 0.5));
    model.validate();
    return model;
  }
  if (id == "model-6.3") return switching_var1(breaks, number_list(spec, "phi", {0.5, -0.5}));
  if (id == "model-6.4") return switching_ma1(breaks, number_list(spec, "theta", {1.0, -1.5}));
  if (id == "model-6.5") return switching_scale(breaks, number_list(spec, "sigma", {1.0, 2.0}));
  if (id == "model-4.4") return four_regime();
  if (id != "custom") throw ConfigError("unknown model id '" + id + "'");

  const auto type = spec.value("type", std::string("ma"));
  const Index d = spec.value("dimension", Index(0));
  if (d <= 0) throw ConfigError("custom model needs a positive \"dimension\"");
  if (!spec.contains("segments") || !spec.at("segments").is_array()) {
    throw ConfigError("custom model needs a \"segments\" array");
  }
  std::vector<std::vector<Eigen::MatrixXd>> segments;
  for (const auto& segment : spec.at("segments")) {
    if (!segment.is_array()) throw ConfigError("each segment is a list of matrices");
    auto& matrices = segments.emplace_back();
    for (const auto& m : segment) matrices.push_back(matrix_from_json(m, d));
  }
  const auto label = spec.value("name", std::string("custom"));
  if (type == "ma") {
    PiecewiseLinearModel model{d, breaks, std::move(segments), label};
    model.validate();
    return model;
  }
  if (type == "var") {
    PiecewiseVarModel model{d, breaks, std::move(segments), label};
    model.validate();
    return model;
  }
  throw ConfigError("custom model type must be \"ma\" or \"var\"");
}

nlohmann::json to_json(const ProcessModel& model) {
  nlohmann::json out;
  out["id"] = "custom";
  out["name"] = name(model);
  out["type"] = std::holds_alternative<PiecewiseLinearModel>(model) ? "ma" : "var";
  out["dimension"] = dimension(model);
  out["breaks"] = breakpoints(model);
  auto segments = nlohmann::json::array();
  std::visit(
      [&](const auto& m) {
        for (const auto& segment : m.segments) {
          auto list = nlohmann::json::array();
          for (const auto& matrix : segment) list.push_back(matrix_to_json(matrix));
          segments.push_back(list);
        }
      },
      model);
  out["segments"] = segments;
  return out;
}

}  // namespace specbreak::models
