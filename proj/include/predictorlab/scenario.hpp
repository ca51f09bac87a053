#pragma once

#include <stdexcept>
#include <string>

#include "predictorlab/model.hpp"
#include "predictorlab/sim.hpp"

namespace predictorlab {

// Bad or inconsistent scenario content.  The message names the offending
// field by its JSON path, e.g. "gains.T: must be a positive finite number".
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct Scenario {
  Plant plant;
  PredictorGains gains;
  SimConfig sim;
  SimMode mode = SimMode::modified;
};

// Parses and fully validates a scenario:
//   {"plant": {"A": [[..]], "B": [[..]], "D": d},
//    "gains": {"K": [[..]], "L": [[..]], "T": t},
//    "sim":   {"h": h, "t_end": te, "x0": [..]},
//    "mode":  "modified" | "classical" | "open_loop"}   (optional)
// Throws IoError when the file cannot be read, ScenarioError on any schema,
// dimension, finiteness, or step-alignment violation.
Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

std::string scenario_to_json(const Scenario& scenario);
void write_scenario_file(const Scenario& scenario, const std::string& path);

}  // namespace predictorlab
