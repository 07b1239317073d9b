#include "splatsim/kinematics/chain_io.hpp"

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {
namespace {

Json capsule_to_json(const Capsule& c) {
  return {{"a", vec3_to_json(c.a)}, {"b", vec3_to_json(c.b)}, {"radius", c.radius}};
}

Capsule capsule_from_json(const Json& j, const std::string& what) {
  if (!j.is_object()) throw invalid_argument(what + ": capsule must be an object");
  return {vec3_from_json(j.value("a", Json()), what + ".a"), vec3_from_json(j.value("b", Json()), what + ".b"),
          json_number(j, "radius", what)};
}

const Json& member(const Json& j, const std::string& key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw invalid_argument(fmt::format("{}: missing '{}'", what, key));
  return j.at(key);
}

}  // namespace

Json chain_to_json(const KinematicChain& chain) {
  Json joints = Json::array();
  for (const auto& jt : chain.joints) {
    joints.push_back({{"name", jt.name},
                      {"origin", pose_to_json(jt.origin)},
                      {"axis", vec3_to_json(jt.axis)},
                      {"limits", {jt.lower, jt.upper}}});
  }
  Json links = Json::array();
  for (const auto& group : chain.link_capsules) {
    Json g = Json::array();
    for (const auto& c : group) g.push_back(capsule_to_json(c));
    links.push_back(g);
  }
  Json hand = Json::array();
  for (const auto& c : chain.hand_capsules) hand.push_back(capsule_to_json(c));
  Json home = Json::array();
  for (Eigen::Index i = 0; i < chain.home.size(); ++i) home.push_back(chain.home[i]);
  return {{"joints", joints},
          {"links", links},
          {"gripper",
           {{"flange_to_gripper", pose_to_json(chain.flange_to_gripper)},
            {"max_opening", chain.gripper_max_opening},
            {"hand", hand},
            {"finger", capsule_to_json(chain.finger)}}},
          {"home", home}};
}

KinematicChain chain_from_json(const Json& j) {
  KinematicChain chain;
  const Json& joints = member(j, "joints", "chain");
  if (!joints.is_array()) throw invalid_argument("chain.joints must be an array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string what = fmt::format("chain.joints[{}]", i);
    const Json& jj = joints[i];
    Joint jt;
    jt.name = jj.value("name", fmt::format("joint{}", i + 1));
    jt.origin = pose_from_json(member(jj, "origin", what), what + ".origin");
    jt.axis = vec3_from_json(member(jj, "axis", what), what + ".axis");
    const Json& lim = member(jj, "limits", what);
    if (!lim.is_array() || lim.size() != 2 || !lim[0].is_number() || !lim[1].is_number()) {
      throw invalid_argument(what + ".limits must be [lower, upper]");
    }
    jt.lower = lim[0].get<double>();
    jt.upper = lim[1].get<double>();
    chain.joints.push_back(jt);
  }
  const Json& links = member(j, "links", "chain");
  if (!links.is_array()) throw invalid_argument("chain.links must be an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!links[i].is_array()) throw invalid_argument(fmt::format("chain.links[{}] must be an array", i));
    std::vector<Capsule> group;
    for (std::size_t k = 0; k < links[i].size(); ++k) {
      group.push_back(capsule_from_json(links[i][k], fmt::format("chain.links[{}][{}]", i, k)));
    }
    chain.link_capsules.push_back(group);
  }
  const Json& g = member(j, "gripper", "chain");
  chain.flange_to_gripper = pose_from_json(member(g, "flange_to_gripper", "chain.gripper"), "chain.gripper.flange_to_gripper");
  chain.gripper_max_opening = json_number(g, "max_opening", "chain.gripper");
  const Json& hand = member(g, "hand", "chain.gripper");
  if (!hand.is_array()) throw invalid_argument("chain.gripper.hand must be an array");
  for (std::size_t k = 0; k < hand.size(); ++k) {
    chain.hand_capsules.push_back(capsule_from_json(hand[k], fmt::format("chain.gripper.hand[{}]", k)));
  }
  chain.finger = capsule_from_json(member(g, "finger", "chain.gripper"), "chain.gripper.finger");
  const Json& home = member(j, "home", "chain");
  if (!home.is_array()) throw invalid_argument("chain.home must be an array");
  chain.home.resize(static_cast<Eigen::Index>(home.size()));
  for (std::size_t i = 0; i < home.size(); ++i) {
    if (!home[i].is_number()) throw invalid_argument(fmt::format("chain.home[{}] must be a number", i));
    chain.home[static_cast<Eigen::Index>(i)] = home[i].get<double>();
  }
  chain.validate();
  return chain;
}

KinematicChain load_chain(const std::string& path) {
  try {
    return chain_from_json(read_json(path));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::invalid_argument) throw;
    throw Error(ErrorCategory::invalid_argument, fmt::format("{}: {}", path, e.what()));
  }
}

void save_chain(const KinematicChain& chain, const std::string& path) { write_json(chain_to_json(chain), path); }

}  // namespace splatsim
