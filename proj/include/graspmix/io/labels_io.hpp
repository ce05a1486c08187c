#pragma once

// Grasp-label documents: one JSON document per object holding the full
// parameter echo and every label that survived filtering.

#include <json.hpp>

#include <string>
#include <vector>

#include "graspmix/format.hpp"
#include "graspmix/grasp.hpp"
#include "graspmix/io/json_geom.hpp"

namespace graspmix::io {

inline nlohmann::json params_json(const AnnotationParams& p) {
  return {{"n_approach", p.n_approach}, {"k_rolls", p.k_rolls}, {"m_seeds", p.m_seeds},
          {"depths", p.depths},         {"mu", p.mu},           {"seed", p.seed}};
}

inline nlohmann::json gripper_json(const GripperModel& g) {
  return {{"finger_extents", vec_json(g.finger_extents)},
          {"palm_extents", vec_json(g.palm_extents)},
          {"opening", g.opening},
          {"finger_length", g.finger_length},
          {"min_bite", g.min_bite}};
}

inline nlohmann::json label_json(const GraspLabel& l) {
  const auto& c = l.candidate;
  return {{"id", {{"seed", c.id.seed}, {"approach", c.id.approach}, {"roll", c.id.roll}, {"depth", c.id.depth}}},
          {"pose", pose_json(c.pose)},
          {"seed_point", vec_json(c.seed)},
          {"approach", vec_json(c.approach.vec())},
          {"depth", c.depth},
          {"bite_depth", l.bite_depth},
          {"margins", {l.margins[0], l.margins[1]}},
          {"contacts", {l.contacts[0], l.contacts[1]}}};
}

inline nlohmann::json labels_document(const std::string& object_id, const AnnotationParams& params,
                                      const GripperModel& gripper, const AnnotationResult& result,
                                      const nlohmann::json& inputs = nlohmann::json::object()) {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : result.labels) labels.push_back(label_json(l));
  return {{"format", formats::grasp_labels.to_json()},
          {"object_id", object_id},
          {"params", params_json(params)},
          {"gripper", gripper_json(gripper)},
          {"frame", "origin at finger-tip centre, +z approach, +y closing axis"},
          {"inputs", inputs},
          {"summary",
           {{"candidates", result.candidates},
            {"collision_free", result.collision_free},
            {"deep_enough", result.deep_enough},
            {"labels", result.labels.size()},
            {"seeds_with_replacement", result.seeds_with_replacement}}},
          {"labels", std::move(labels)}};
}

struct LabelsDocument {
  std::string object_id;
  AnnotationParams params;
  GripperModel gripper;
  std::vector<GraspLabel> labels;
};

inline LabelsDocument parse_labels_document(const nlohmann::json& j) {
  check_format(j, formats::grasp_labels);
  LabelsDocument d;
  try {
    d.object_id = j.at("object_id").get<std::string>();
    const auto& p = j.at("params");
    d.params.n_approach = p.at("n_approach").get<std::size_t>();
    d.params.k_rolls = p.at("k_rolls").get<std::size_t>();
    d.params.m_seeds = p.at("m_seeds").get<std::size_t>();
    d.params.depths = p.at("depths").get<std::vector<double>>();
    d.params.mu = p.at("mu").get<double>();
    d.params.seed = p.at("seed").get<std::uint64_t>();
    const auto& g = j.at("gripper");
    d.gripper.finger_extents = vec_from_json(g.at("finger_extents"), "gripper.finger_extents");
    d.gripper.palm_extents = vec_from_json(g.at("palm_extents"), "gripper.palm_extents");
    d.gripper.opening = g.at("opening").get<double>();
    d.gripper.finger_length = g.at("finger_length").get<double>();
    d.gripper.min_bite = g.at("min_bite").get<double>();
    for (const auto& l : j.at("labels")) {
      GraspLabel label;
      const auto& id = l.at("id");
      label.candidate.id = {id.at("seed").get<std::size_t>(), id.at("approach").get<std::size_t>(),
                            id.at("roll").get<std::size_t>(), id.at("depth").get<std::size_t>()};
      label.candidate.pose = pose_from_json(l.at("pose"), "label pose");
      label.candidate.seed = vec_from_json(l.at("seed_point"), "label seed_point");
      label.candidate.approach = Direction::normalized(vec_from_json(l.at("approach"), "label approach"));
      label.candidate.depth = l.at("depth").get<double>();
      label.bite_depth = l.at("bite_depth").get<double>();
      label.margins = {l.at("margins")[0].get<double>(), l.at("margins")[1].get<double>()};
      label.contacts = {l.at("contacts")[0].get<std::size_t>(), l.at("contacts")[1].get<std::size_t>()};
      d.labels.push_back(std::move(label));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("malformed label document: ") + e.what());
  }
  return d;
}

}  // namespace graspmix::io
