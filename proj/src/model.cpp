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

#include "seabal/model.hpp"

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "seabal/spatial.hpp"

namespace seabal {
namespace {

struct JointEntry {
  std::string name;
  std::string parent, child;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  int line = 0;
};

struct LinkEntry {
  Link link;
  int line = 0;
};

struct ContactEntry {
  std::string name;
  std::string link;
  Vec3 origin = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  double half_x = 0.05, half_y = 0.05;
  int line = 0;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ModelError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<double> parse_numbers(const std::string& origin, int line,
                                  std::istringstream& in, size_t count,
                                  const std::string& what) {
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (out.size() != count)
    fail(origin, line,
         what + " expects " + std::to_string(count) + " numbers, got " +
             std::to_string(out.size()));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt3(const Vec3& v) {
  return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
}

}  // namespace

int RobotModel::link_index(const std::string& name) const {
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].name == name) return static_cast<int>(i);
  return -1;
}

int RobotModel::joint_index(const std::string& name) const {
  for (int j = 0; j < joint_count(); ++j)
    if (links[j + 1].joint_name == name) return j;
  return -1;
}

RobotModel parse_model(const std::string& text, const std::string& origin) {
  std::vector<LinkEntry> links;
  std::vector<JointEntry> joints;
  std::vector<ContactEntry> contacts;
  double gravity = 9.81;

  // Section being filled: 0 none, 1 link, 2 joint, 3 contact.
  int section = 0;
  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream in(raw);
    std::string key;
    if (!(in >> key)) continue;

    if (key == "gravity") {
      gravity = parse_numbers(origin, line, in, 1, "gravity")[0];
      section = 0;
    } else if (key == "link" && section != 3) {
      // Inside a contact section "link" is the attachment field, so a new
      // link section cannot start there; contacts go last.
      LinkEntry e;
      e.line = line;
      if (!(in >> e.link.name)) fail(origin, line, "link needs a name");
      links.push_back(e);
      section = 1;
    } else if (key == "joint") {
      JointEntry e;
      e.line = line;
      if (!(in >> e.name)) fail(origin, line, "joint needs a name");
      joints.push_back(e);
      section = 2;
    } else if (key == "contact") {
      ContactEntry e;
      e.line = line;
      if (!(in >> e.name)) fail(origin, line, "contact needs a name");
      contacts.push_back(e);
      section = 3;
    } else if (section == 1) {
      Link& l = links.back().link;
      if (key == "mass") {
        l.mass = parse_numbers(origin, line, in, 1, "mass")[0];
      } else if (key == "com") {
        auto v = parse_numbers(origin, line, in, 3, "com");
        l.com = Vec3(v[0], v[1], v[2]);
      } else if (key == "inertia") {
        std::vector<double> v;
        double x;
        while (in >> x) v.push_back(x);
        if (v.size() == 3) v.insert(v.end(), {0.0, 0.0, 0.0});
        if (v.size() != 6)
          fail(origin, line, "inertia expects 3 (diagonal) or 6 (xx yy zz xy xz yz) numbers");
        l.inertia << v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2];
      } else {
        fail(origin, line, "unknown link field '" + key + "'");
      }
    } else if (section == 2) {
      JointEntry& j = joints.back();
      if (key == "parent") {
        in >> j.parent;
      } else if (key == "child") {
        in >> j.child;
      } else if (key == "axis") {
        auto v = parse_numbers(origin, line, in, 3, "axis");
        j.axis = Vec3(v[0], v[1], v[2]);
      } else if (key == "origin") {
        auto v = parse_numbers(origin, line, in, 3, "origin");
        j.origin = Vec3(v[0], v[1], v[2]);
      } else if (key == "rpy") {
        auto v = parse_numbers(origin, line, in, 3, "rpy");
        j.rpy = Vec3(v[0], v[1], v[2]);
      } else {
        fail(origin, line, "unknown joint field '" + key + "'");
      }
    } else if (section == 3) {
      ContactEntry& c = contacts.back();
      if (key == "link") {
        in >> c.link;
      } else if (key == "origin") {
        auto v = parse_numbers(origin, line, in, 3, "origin");
        c.origin = Vec3(v[0], v[1], v[2]);
      } else if (key == "rpy") {
        auto v = parse_numbers(origin, line, in, 3, "rpy");
        c.rpy = Vec3(v[0], v[1], v[2]);
      } else if (key == "half_extents") {
        auto v = parse_numbers(origin, line, in, 2, "half_extents");
        c.half_x = v[0];
        c.half_y = v[1];
      } else {
        fail(origin, line, "unknown contact field '" + key + "'");
      }
    } else {
      fail(origin, line, "unexpected '" + key + "' outside a section");
    }
  }

  if (links.empty()) fail(origin, line, "no links defined");

  RobotModel model;
  model.gravity = gravity;
  std::map<std::string, int> index;
  for (auto& e : links) {
    if (index.count(e.link.name))
      fail(origin, e.line, "duplicate link '" + e.link.name + "'");
    index[e.link.name] = static_cast<int>(model.links.size());
    if (e.link.mass <= 0.0)
      fail(origin, e.line, "link '" + e.link.name + "' needs positive mass");
    Eigen::SelfAdjointEigenSolver<Mat3> es(e.link.inertia);
    if (es.eigenvalues().minCoeff() <= 0.0)
      fail(origin, e.line,
           "link '" + e.link.name + "' inertia is not positive definite");
    model.links.push_back(e.link);
    model.total_mass += e.link.mass;
  }

  // Joint k attaches to link k+1: document order of joints must follow the
  // document order of their child links, giving one canonical coordinate
  // numbering.
  if (joints.size() + 1 != links.size())
    fail(origin, line,
         "expected " + std::to_string(links.size() - 1) + " joints for " +
             std::to_string(links.size()) + " links, got " +
             std::to_string(joints.size()));
  std::map<std::string, int> joint_names;
  for (size_t k = 0; k < joints.size(); ++k) {
    const JointEntry& j = joints[k];
    if (joint_names.count(j.name))
      fail(origin, j.line, "duplicate joint '" + j.name + "'");
    joint_names[j.name] = 1;
    auto pit = index.find(j.parent);
    if (pit == index.end())
      fail(origin, j.line, "joint '" + j.name + "' parent link '" + j.parent +
                               "' not defined");
    auto cit = index.find(j.child);
    if (cit == index.end())
      fail(origin, j.line,
           "joint '" + j.name + "' child link '" + j.child + "' not defined");
    if (cit->second != static_cast<int>(k) + 1)
      fail(origin, j.line,
           "joint '" + j.name + "' is joint " + std::to_string(k) +
               " but its child '" + j.child + "' is link " +
               std::to_string(cit->second) +
               "; declare joints in the order of their child links");
    if (pit->second == cit->second)
      fail(origin, j.line, "joint '" + j.name + "' connects a link to itself");
    if (pit->second > cit->second)
      fail(origin, j.line,
           "joint '" + j.name + "' parent '" + j.parent +
               "' appears after its child; links must be in root-first order");
    const double nrm = j.axis.norm();
    if (nrm < 1e-12)
      fail(origin, j.line, "joint '" + j.name + "' has a zero-norm axis");
    Link& child = model.links[cit->second];
    child.parent = pit->second;
    child.joint_name = j.name;
    // Keep already-unit axes bit-exact so serialize/parse is a fixed point.
    child.joint_axis = std::abs(nrm - 1.0) > 1e-9 ? Vec3(j.axis / nrm) : j.axis;
    child.joint_origin = j.origin;
    child.joint_rpy = j.rpy;
    child.joint_rot = rpy_to_matrix(j.rpy);
  }
  if (model.links[0].parent != -1)
    fail(origin, links[0].line, "first link must be the floating base");
  for (size_t i = 1; i < model.links.size(); ++i)
    if (model.links[i].parent < 0)
      fail(origin, links[i].line,
           "link '" + model.links[i].name + "' is not attached by any joint");

  for (const ContactEntry& c : contacts) {
    auto it = index.find(c.link);
    if (it == index.end())
      fail(origin, c.line,
           "contact '" + c.name + "' names unknown link '" + c.link + "'");
    if (c.half_x <= 0.0 || c.half_y <= 0.0)
      fail(origin, c.line, "contact '" + c.name + "' half_extents must be positive");
    ContactFrame f;
    f.name = c.name;
    f.link = it->second;
    f.origin = c.origin;
    f.rpy = c.rpy;
    f.rot = rpy_to_matrix(c.rpy);
    f.half_x = c.half_x;
    f.half_y = c.half_y;
    model.contacts.push_back(f);
  }
  return model;
}

RobotModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path);
}

std::string serialize_model(const RobotModel& model) {
  std::ostringstream out;
  out << "gravity " << fmt(model.gravity) << "\n";
  for (const Link& l : model.links) {
    out << "\nlink " << l.name << "\n";
    out << "  mass " << fmt(l.mass) << "\n";
    out << "  com " << fmt3(l.com) << "\n";
    out << "  inertia " << fmt(l.inertia(0, 0)) << " " << fmt(l.inertia(1, 1))
        << " " << fmt(l.inertia(2, 2)) << " " << fmt(l.inertia(0, 1)) << " "
        << fmt(l.inertia(0, 2)) << " " << fmt(l.inertia(1, 2)) << "\n";
  }
  for (size_t i = 1; i < model.links.size(); ++i) {
    const Link& l = model.links[i];
    out << "\njoint " << l.joint_name << "\n";
    out << "  parent " << model.links[l.parent].name << "\n";
    out << "  child " << l.name << "\n";
    out << "  axis " << fmt3(l.joint_axis) << "\n";
    out << "  origin " << fmt3(l.joint_origin) << "\n";
    out << "  rpy " << fmt3(l.joint_rpy) << "\n";
  }
  for (const ContactFrame& c : model.contacts) {
    out << "\ncontact " << c.name << "\n";
    out << "  link " << model.links[c.link].name << "\n";
    out << "  origin " << fmt3(c.origin) << "\n";
    out << "  rpy " << fmt3(c.rpy) << "\n";
    out << "  half_extents " << fmt(c.half_x) << " " << fmt(c.half_y) << "\n";
  }
  return out.str();
}

}  // namespace seabal
