#include "predictorlab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "predictorlab/io.hpp"

namespace predictorlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ScenarioError(path + ": " + why);
}

const json& member(const json& obj, const std::string& parent, const char* key) {
  if (!obj.is_object()) fail(parent, "must be an object");
  const auto it = obj.find(key);
  if (it == obj.end())
    fail(parent.empty() ? key : parent + "." + key, "is required");
  return *it;
}

double parse_number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double parse_positive(const json& value, const std::string& path) {
  const double x = parse_number(value, path);
  if (!(x > 0.0)) fail(path, "must be a positive finite number");
  return x;
}

Matrix parse_matrix(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty())
    fail(path, "must be a non-empty array of rows");
  const std::size_t rows = value.size();
  std::size_t cols = 0;
  std::vector<double> data;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = value[i];
    if (!row.is_array() || row.empty())
      fail(path, "row " + std::to_string(i) + " must be a non-empty array");
    if (i == 0) {
      cols = row.size();
      data.reserve(rows * cols);
    } else if (row.size() != cols) {
      fail(path, "rows must all have the same length");
    }
    for (std::size_t j = 0; j < cols; ++j)
      data.push_back(parse_number(row[j], path + "[" + std::to_string(i) + "][" +
                                              std::to_string(j) + "]"));
  }
  return Matrix(rows, cols, data);
}

Vector parse_vector(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty())
    fail(path, "must be a non-empty array of numbers");
  std::vector<double> data;
  data.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    data.push_back(parse_number(value[i], path + "[" + std::to_string(i) + "]"));
  return Vector(data);
}

bool divides_evenly(double whole, double step) {
  const double ratio = whole / step;
  return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("scenario: must be a JSON object");

  const json& plant_obj = member(root, "", "plant");
  const Matrix a = parse_matrix(member(plant_obj, "plant", "A"), "plant.A");
  const Matrix b = parse_matrix(member(plant_obj, "plant", "B"), "plant.B");
  const double d = parse_positive(member(plant_obj, "plant", "D"), "plant.D");
  if (!a.square()) fail("plant.A", "must be square");
  if (b.rows() != a.rows()) fail("plant.B", "row count must match plant.A");

  const json& gains_obj = member(root, "", "gains");
  const Matrix k = parse_matrix(member(gains_obj, "gains", "K"), "gains.K");
  const Matrix l = parse_matrix(member(gains_obj, "gains", "L"), "gains.L");
  const double t_period = parse_positive(member(gains_obj, "gains", "T"), "gains.T");
  if (k.rows() != b.cols() || k.cols() != a.rows())
    fail("gains.K", "must be m x n for an n-state, m-input plant");
  if (!l.square() || l.rows() != a.rows())
    fail("gains.L", "must be square with the plant's state dimension");

  const json& sim_obj = member(root, "", "sim");
  const double h = parse_positive(member(sim_obj, "sim", "h"), "sim.h");
  const double t_end = parse_positive(member(sim_obj, "sim", "t_end"), "sim.t_end");
  const Vector x0 = parse_vector(member(sim_obj, "sim", "x0"), "sim.x0");
  if (x0.dim() != a.rows()) fail("sim.x0", "length must match the state dimension");
  if (!divides_evenly(d, h)) fail("plant.D", "must be an integer multiple of sim.h");
  if (!divides_evenly(t_period, h))
    fail("gains.T", "must be an integer multiple of sim.h");

  SimMode mode = SimMode::modified;
  if (const auto it = root.find("mode"); it != root.end()) {
    if (!it->is_string()) fail("mode", "must be a string");
    try {
      mode = mode_from_name(it->get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail("mode", e.what());
    }
  }

  try {
    Scenario scenario{Plant(a, b, d), PredictorGains(k, l, t_period),
                      SimConfig{h, t_end, x0}, mode};
    scenario.gains.check_dimensions(scenario.plant);
    return scenario;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw IoError("cannot read scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading scenario file: " + path);
  return parse_scenario_text(buffer.str());
}

std::string scenario_to_json(const Scenario& scenario) {
  json root;
  auto matrix_json = [](const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  root["plant"]["A"] = matrix_json(scenario.plant.A);
  root["plant"]["B"] = matrix_json(scenario.plant.B);
  root["plant"]["D"] = scenario.plant.D;
  root["gains"]["K"] = matrix_json(scenario.gains.K);
  root["gains"]["L"] = matrix_json(scenario.gains.L);
  root["gains"]["T"] = scenario.gains.T;
  root["sim"]["h"] = scenario.sim.h;
  root["sim"]["t_end"] = scenario.sim.t_end;
  json x0 = json::array();
  for (std::size_t i = 0; i < scenario.sim.x0.dim(); ++i)
    x0.push_back(scenario.sim.x0[i]);
  root["sim"]["x0"] = x0;
  root["mode"] = mode_name(scenario.mode);
  return root.dump(2) + "\n";
}

void write_scenario_file(const Scenario& scenario, const std::string& path) {
  write_file_atomic(path, scenario_to_json(scenario));
}

}  // namespace predictorlab
