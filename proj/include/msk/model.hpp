#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "msk/muscle.hpp"

namespace msk {

struct LinkSpec {
    std::string name;
    double length = 1.0;      // [m]
    double mass = 1.0;        // [kg]
    double inertia = 0.1;     // rotational inertia about COM [kg m^2]
    double com_offset = 0.5;  // COM distance from proximal joint along local x [m]
};

/// Hinge joint attaching link `child` to link `parent` (-1 = world, only
/// valid for the first joint of a fixed-base model).
struct JointSpec {
    std::string name;
    int child = 0;
    int parent = -1;
    Eigen::Vector2d anchor = Eigen::Vector2d::Zero();  // in parent local frame
    double mount_angle = 0.0;                          // child frame angle at q = 0
    double limit_lo = -3.0, limit_hi = 3.0;            // [rad]
    double damping = 0.0;                              // [N m s / rad]
};

struct ContactSphere {
    int link = 0;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();
    double radius = 0.02;
};

struct ContactParams {
    double stiffness = 2.0e4;      // [N/m]
    double damping = 500.0;        // [N s/m]
    double friction = 0.9;
    double smoothing_vel = 0.05;   // tanh friction smoothing [m/s]
};

enum class RootType { FixedBase, FloatingPlanar };

/// Full description of a planar articulated muscle-driven body.
///
/// DOF layout: fixed base -> q = [joint angles, one per link];
/// floating root -> q = [root x, root z, root pitch, joint angles of links 1..].
/// Joints are listed in child-link order.
struct ModelSpec {
    std::string name;
    RootType root = RootType::FixedBase;
    double gravity = -9.81;  // world z acceleration
    double joint_limit_stiffness = 200.0;  // one-sided penalty [N m / rad]
    std::vector<LinkSpec> links;
    std::vector<JointSpec> joints;
    std::vector<MuscleParams> muscles;
    std::vector<ContactSphere> contact_spheres;
    std::vector<int> key_bodies;
    ContactParams contact;

    int n_links() const { return static_cast<int>(links.size()); }
    int n_joints() const { return static_cast<int>(joints.size()); }
    int n_muscles() const { return static_cast<int>(muscles.size()); }
    int n_key_bodies() const { return static_cast<int>(key_bodies.size()); }
    int n_root_dof() const { return root == RootType::FloatingPlanar ? 3 : 0; }
    int nq() const { return n_root_dof() + n_joints(); }
    double total_mass() const;

    /// All invariant violations, empty when the spec is valid.
    std::vector<std::string> validate() const;
};

ModelSpec load_model(const std::string& path);
ModelSpec parse_model_json(const std::string& text, const std::string& origin);

}  // namespace msk
