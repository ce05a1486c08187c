#pragma once

// Trajectory JSONL: line 1 is a header object, every following line one step.
//
//   {"format": {...}, "instruction": "...", "target_id": "...",
//    "target_init_pose": {"q": [w,x,y,z], "t": [x,y,z]}, "source": "full",
//    "seed": 7, "segments": [...]?, "segmentation": {...}?}
//   {"t": 0.0, "ee_pose": {...}, "gripper_open": 1.0,
//    "target_position": [x,y,z]?, "gt_phase": "SRP"?}
//
// A corpus is a directory of *.jsonl files; the file stem is the trajectory id.

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "graspmix/error.hpp"
#include "graspmix/format.hpp"
#include "graspmix/io/json_geom.hpp"
#include "graspmix/traj.hpp"

namespace graspmix::io {

struct TrajectoryFile {
  std::string id;
  Trajectory trajectory;
  std::optional<std::vector<Segment>> segments;
  nlohmann::json segmentation;  // config echo when segments are present
};

inline nlohmann::json segments_json(const std::vector<Segment>& segs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : segs) out.push_back({{"phase", std::string(to_string(s.phase))}, {"first", s.first}, {"last", s.last}});
  return out;
}

inline nlohmann::json config_json(const SegmentationConfig& c) {
  return {{"dist_thresh", c.dist_thresh},   {"angle_thresh", c.angle_thresh}, {"close_thresh", c.close_thresh},
          {"lift_thresh", c.lift_thresh},   {"hold_steps", c.hold_steps},     {"use_ground_truth", c.use_ground_truth}};
}

inline std::string trajectory_jsonl(const Trajectory& traj, const std::vector<Segment>* segments = nullptr,
                                    const nlohmann::json& segmentation = nullptr) {
  nlohmann::json header = {{"format", formats::trajectory.to_json()},
                           {"instruction", traj.instruction},
                           {"target_id", traj.target_id},
                           {"source", std::string(to_string(traj.source))},
                           {"seed", traj.seed}};
  if (traj.target_init_pose) header["target_init_pose"] = pose_json(*traj.target_init_pose);
  if (segments) header["segments"] = segments_json(*segments);
  if (!segmentation.is_null()) header["segmentation"] = segmentation;
  std::string out = header.dump() + "\n";
  for (const auto& s : traj.steps) {
    nlohmann::json j = {{"t", s.t}, {"ee_pose", pose_json(s.ee_pose)}, {"gripper_open", s.gripper_open}};
    if (s.target_position) j["target_position"] = vec_json(*s.target_position);
    if (s.gt_phase) j["gt_phase"] = std::string(to_string(*s.gt_phase));
    out += j.dump();
    out += "\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::io, "cannot write " + path.string());
  out << text;
  require(out.good(), Errc::io, "failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                             const std::vector<Segment>* segments = nullptr,
                             const nlohmann::json& segmentation = nullptr) {
  write_text(path, trajectory_jsonl(traj, segments, segmentation));
}

inline TrajectoryFile read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open " + path.string());
  const std::string where = path.string();
  TrajectoryFile f;
  f.id = path.stem().string();
  std::string line;
  std::size_t line_no = 0;
  try {
    require(static_cast<bool>(std::getline(in, line)), Errc::format, where + ": empty file");
    ++line_no;
    const auto header = nlohmann::json::parse(line);
    check_format(header, formats::trajectory);
    auto& t = f.trajectory;
    t.instruction = header.value("instruction", "");
    t.target_id = header.value("target_id", "");
    t.source = parse_source(header.value("source", "full"));
    t.seed = header.value("seed", std::uint64_t{0});
    if (header.contains("target_init_pose")) {
      t.target_init_pose = pose_from_json(header["target_init_pose"], where + ": target_init_pose");
    }
    if (header.contains("segments")) {
      std::vector<Segment> segs;
      for (const auto& s : header["segments"]) {
        segs.push_back({parse_phase(s.at("phase").get<std::string>()), s.at("first").get<std::size_t>(),
                        s.at("last").get<std::size_t>()});
      }
      f.segments = std::move(segs);
      f.segmentation = header.value("segmentation", nlohmann::json());
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto j = nlohmann::json::parse(line);
      const std::string at = where + ":" + std::to_string(line_no);
      TrajectoryStep s;
      s.t = j.at("t").get<double>();
      s.ee_pose = pose_from_json(j.at("ee_pose"), at + " ee_pose");
      s.gripper_open = j.at("gripper_open").get<double>();
      if (j.contains("target_position")) s.target_position = vec_from_json(j["target_position"], at + " target_position");
      if (j.contains("gt_phase")) s.gt_phase = parse_phase(j["gt_phase"].get<std::string>());
      t.steps.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, where + ":" + std::to_string(line_no) + ": " + e.what());
  }
  if (f.segments) {
    require(is_partition(*f.segments, f.trajectory.size()), Errc::format, where + ": segments do not partition the steps");
  }
  return f;
}

/// *.jsonl files of a directory (or a single file), ordered by file name.
inline std::vector<std::filesystem::path> list_jsonl(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  require(fs::exists(path), Errc::io, "no such file or directory: " + path.string());
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  return files;
}

}  // namespace graspmix::io
