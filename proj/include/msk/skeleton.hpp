#pragma once

#include <Eigen/Dense>
#include <vector>

#include "msk/model.hpp"
#include "msk/muscle.hpp"

namespace msk {

inline constexpr double kSimDt = 0.002;   // physics substep [s]
inline constexpr double kCtrlDt = 0.02;   // control step [s]
inline constexpr int kSubsteps = 10;
inline constexpr double kMinFiberLength = 0.01;  // guard for degenerate geometry

/// World pose of a link frame (origin at proximal joint, x along the link).
struct Frame {
    Eigen::Vector2d origin = Eigen::Vector2d::Zero();
    double angle = 0.0;
};

struct Kinematics {
    std::vector<Frame> frames;                    // one per link
    std::vector<Eigen::Vector2d> joint_anchors;   // world anchor per joint
};

struct SimState {
    Eigen::VectorXd q;
    Eigen::VectorXd dq;
    std::vector<MuscleState> muscles;
    double t = 0.0;
};

/// Per-control-step byproducts for logging.
struct StepInfo {
    Eigen::Matrix2Xd grf_per_link;   // substep-mean world contact force per link
    Eigen::VectorXd muscle_power;    // substep-mean |F * v| per muscle [W]
};

struct ContactResult {
    Eigen::VectorXd tau;             // generalized external force
    Eigen::Matrix2Xd sphere_force;   // world force per sphere
};

Kinematics forward_kinematics(const ModelSpec& spec, const Eigen::VectorXd& q);

/// World position of a point given in a link's local frame (link -1 = world).
Eigen::Vector2d world_point(const Kinematics& kin, int link, const Eigen::Vector2d& local);

/// 2 x nq Jacobian of a world point attached to `link`.
Eigen::MatrixXd point_jacobian(const ModelSpec& spec, const Kinematics& kin, int link,
                               const Eigen::Vector2d& world_pt);

double mtu_length(const ModelSpec& spec, const Kinematics& kin, int muscle_index);
double mtu_length(const ModelSpec& spec, const Eigen::VectorXd& q, int muscle_index);

/// Moment-arm matrix, J_m(i, j) = -dL_i/dq_j; joint torques are J_m^T F.
Eigen::MatrixXd moment_arms(const ModelSpec& spec, const Eigen::VectorXd& q);

Eigen::MatrixXd mass_matrix(const ModelSpec& spec, const Eigen::VectorXd& q);

/// Coriolis/centrifugal + gravity + viscous damping + joint-limit penalty,
/// on the left-hand side of M qdd + C = J_m^T F + tau_ext.
Eigen::VectorXd bias_forces(const ModelSpec& spec, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& dq);

ContactResult contact_forces(const ModelSpec& spec, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& dq, const ContactParams& params);

SimState make_initial_state(const ModelSpec& spec, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& dq, double init_act = 0.0);

/// Advances one control step (10 substeps of 2 ms): activation dynamics,
/// Hill forces through the moment arms, contact, semi-implicit Euler.
/// Throws SimulationDiverged if the state goes non-finite.
StepInfo step(SimState& state, const Eigen::VectorXd& u, const ModelSpec& spec);

double mechanical_energy(const ModelSpec& spec, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& dq);

/// COM world positions (2 x K) and frame angles (K) of the key bodies.
void key_body_state(const ModelSpec& spec, const Kinematics& kin,
                    Eigen::Matrix2Xd& positions, Eigen::VectorXd& angles);

}  // namespace msk
