// Copyright 2026 The seabal Authors
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

#ifndef SEABAL_MODEL_HPP_
#define SEABAL_MODEL_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "seabal/types.hpp"

namespace seabal {

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// One rigid body of the tree. Link 0 is the floating base; every other link
// is attached to its parent through the revolute joint stored on the link
// itself, so joint i drives link i+1 and the joint vector s follows link
// order.
struct Link {
  std::string name;
  int parent = -1;           // link index, -1 for the base
  double mass = 0.0;         // kg
  Vec3 com = Vec3::Zero();   // CoM offset in the link frame, m
  Mat3 inertia = Mat3::Zero();  // rotational inertia about the CoM, link frame

  // Joint attaching this link to its parent (unused on the base link).
  std::string joint_name;
  Vec3 joint_axis = Vec3::UnitZ();       // unit axis in the joint frame
  Vec3 joint_rpy = Vec3::Zero();         // fixed parent->joint rotation, rad
  Vec3 joint_origin = Vec3::Zero();      // joint position in the parent frame, m
  Mat3 joint_rot = Mat3::Identity();     // derived from joint_rpy
};

struct ContactFrame {
  std::string name;
  int link = 0;
  Vec3 rpy = Vec3::Zero();       // fixed link->contact rotation, rad
  Vec3 origin = Vec3::Zero();    // contact position in the link frame, m
  double half_x = 0.05;          // foot CoP rectangle half-extents, m
  double half_y = 0.05;
  Mat3 rot = Mat3::Identity();   // derived from rpy
};

struct RobotModel {
  std::vector<Link> links;
  std::vector<ContactFrame> contacts;
  double gravity = 9.81;        // m/s^2
  double total_mass = 0.0;      // derived at load time

  int joint_count() const { return static_cast<int>(links.size()) - 1; }
  int contact_count() const { return static_cast<int>(contacts.size()); }
  int velocity_dim() const { return joint_count() + 6; }

  int link_index(const std::string& name) const;
  std::string joint_name(int joint) const { return links[joint + 1].joint_name; }
  int joint_index(const std::string& name) const;  // -1 if unknown
};

// Parses the structured-text model format (sections `link`, `joint`,
// `contact`; see docs/model_format.md). Validates the tree and derives the
// total mass. Ordering of links, joints and contacts is document order.
RobotModel parse_model(const std::string& text, const std::string& origin = "<string>");
RobotModel load_model(const std::string& path);

// Canonical serialization; parse(serialize(m)) reproduces m bit-exactly.
std::string serialize_model(const RobotModel& model);

}  // namespace seabal

#endif  // SEABAL_MODEL_HPP_
