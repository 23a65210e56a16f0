// Copyright 2026 the bernopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ocp/json_config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

#include "ocp/examples.hpp"

namespace bernopt::ocp {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw ArgumentError("problem config: unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

Eigen::VectorXd as_vector(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) {
    throw ArgumentError("problem config: " + where + " must be a non-empty array");
  }
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ArgumentError("problem config: " + where + " must contain numbers");
    }
    v[static_cast<int>(i)] = arr[i].get<double>();
  }
  return v;
}

double as_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ArgumentError("problem config: missing numeric \"" + key + "\" in " + where);
  }
  return obj[key].get<double>();
}

struct HorizonParams {
  double t0 = 0.0;
  double tf_lower = 0.0;
  double tf_upper = 0.0;
};

HorizonParams parse_free_horizon(const json& doc) {
  if (!doc.contains("horizon") || !doc["horizon"].is_object()) {
    throw ArgumentError("problem config: missing \"horizon\" object");
  }
  const json& h = doc["horizon"];
  reject_unknown_keys(h, {"type", "t0", "tf_min", "tf_max"}, "horizon");
  if (!h.contains("type") || h["type"] != "free") {
    throw ArgumentError(
        "problem config: these families minimize arrival time and require "
        "horizon.type == \"free\"");
  }
  HorizonParams out;
  out.t0 = h.contains("t0") ? as_number(h, "t0", "horizon") : 0.0;
  out.tf_lower = as_number(h, "tf_min", "horizon");
  out.tf_upper = as_number(h, "tf_max", "horizon");
  return out;
}

ProblemBundle load_single_integrator(const json& doc) {
  reject_unknown_keys(doc,
                      {"family", "horizon", "start", "goal", "obstacles", "speed_band"},
                      "document root");
  SingleIntegratorParams params;
  params.start = as_vector(doc.at("start"), "start");
  params.goal = as_vector(doc.at("goal"), "goal");
  if (doc.contains("obstacles")) {
    if (!doc["obstacles"].is_array()) {
      throw ArgumentError("problem config: \"obstacles\" must be an array");
    }
    for (const auto& obs : doc["obstacles"]) {
      reject_unknown_keys(obs, {"center", "clearance"}, "obstacles[]");
      params.obstacles.emplace_back(as_vector(obs.at("center"), "obstacle center"),
                                    as_number(obs, "clearance", "obstacles[]"));
    }
  }
  const Eigen::VectorXd band = as_vector(doc.at("speed_band"), "speed_band");
  if (band.size() != 2) throw ArgumentError("problem config: speed_band needs 2 entries");
  params.speed_min = band[0];
  params.speed_max = band[1];
  const HorizonParams h = parse_free_horizon(doc);
  params.t0 = h.t0;
  params.tf_lower = h.tf_lower;
  params.tf_upper = h.tf_upper;
  return make_single_integrator(params);
}

ProblemBundle load_dubins_fleet(const json& doc) {
  reject_unknown_keys(doc,
                      {"family", "horizon", "vehicles", "speed_band", "max_turn_rate",
                       "separation", "separation_mode"},
                      "document root");
  DubinsFleetParams params;
  if (!doc.contains("vehicles") || !doc["vehicles"].is_array() || doc["vehicles"].empty()) {
    throw ArgumentError("problem config: \"vehicles\" must be a non-empty array");
  }
  for (const auto& veh : doc["vehicles"]) {
    reject_unknown_keys(veh, {"start", "goal"}, "vehicles[]");
    const Eigen::VectorXd start = as_vector(veh.at("start"), "vehicle start");
    const Eigen::VectorXd goal = as_vector(veh.at("goal"), "vehicle goal");
    if (start.size() != 3 || goal.size() != 2) {
      throw ArgumentError(
          "problem config: vehicle start needs [x, y, heading], goal needs [x, y]");
    }
    DubinsFleetParams::Vehicle v;
    v.start = start;
    v.goal = goal;
    params.vehicles.push_back(v);
  }
  const Eigen::VectorXd band = as_vector(doc.at("speed_band"), "speed_band");
  if (band.size() != 2) throw ArgumentError("problem config: speed_band needs 2 entries");
  params.speed_min = band[0];
  params.speed_max = band[1];
  params.max_turn_rate = as_number(doc, "max_turn_rate", "document root");
  params.separation = as_number(doc, "separation", "document root");
  if (doc.contains("separation_mode")) {
    const std::string mode = doc["separation_mode"].get<std::string>();
    if (mode == "temporal") {
      params.separation_mode = SeparationMode::temporal;
    } else if (mode == "spatial") {
      params.separation_mode = SeparationMode::spatial;
    } else {
      throw ArgumentError("problem config: separation_mode must be temporal or spatial");
    }
  }
  const HorizonParams h = parse_free_horizon(doc);
  params.t0 = h.t0;
  params.tf_lower = h.tf_lower;
  params.tf_upper = h.tf_upper;
  return make_dubins_fleet(params);
}

}  // namespace

ProblemBundle problem_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("problem config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("family")) {
    throw ArgumentError("problem config: top-level object with a \"family\" key required");
  }
  const std::string family = doc["family"].get<std::string>();
  if (family == "single_integrator") return load_single_integrator(doc);
  if (family == "dubins_fleet") return load_dubins_fleet(doc);
  throw ArgumentError("problem config: unknown family \"" + family + "\"");
}

ProblemBundle problem_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("problem config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return problem_from_json(text);
}

}  // namespace bernopt::ocp
