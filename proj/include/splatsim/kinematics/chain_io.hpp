#pragma once

#include <string>

#include "splatsim/core/json_util.hpp"
#include "splatsim/kinematics/chain.hpp"

namespace splatsim {

// JSON chain description:
//   {"joints": [{"name", "origin": pose, "axis": [x,y,z], "limits": [lo, hi]}],
//    "links": [[{"a": [..], "b": [..], "radius": r}], ...],   // base first
//    "gripper": {"flange_to_gripper": pose, "max_opening": m,
//                "hand": [capsule...], "finger": capsule},
//    "home": [q...]}
Json chain_to_json(const KinematicChain& chain);
// Validates the result; malformed fields raise invalid_argument.
KinematicChain chain_from_json(const Json& j);

KinematicChain load_chain(const std::string& path);
void save_chain(const KinematicChain& chain, const std::string& path);

}  // namespace splatsim
