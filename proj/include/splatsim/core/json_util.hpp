#pragma once

#include <string>

#include "json.hpp"

#include "splatsim/core/camera.hpp"
#include "splatsim/core/pose.hpp"

namespace splatsim {

using Json = nlohmann::json;

Json read_json(const std::string& path);
// Pretty-printed with a trailing newline.
void write_json(const Json& j, const std::string& path);

// {"q": [w,x,y,z], "t": [x,y,z]}
Json pose_to_json(const Pose& pose);
// Throws invalid_argument on malformed input; `what` names the field.
Pose pose_from_json(const Json& j, const std::string& what);
Json vec3_to_json(const Eigen::Vector3d& v);
Eigen::Vector3d vec3_from_json(const Json& j, const std::string& what);
Json camera_to_json(const CameraView& cam);
CameraView camera_from_json(const Json& j, const std::string& what);

// Typed member access with descriptive errors.
double json_number(const Json& j, const std::string& key, const std::string& what);
double json_number_or(const Json& j, const std::string& key, double fallback, const std::string& what);
std::string json_string(const Json& j, const std::string& key, const std::string& what);

}  // namespace splatsim
