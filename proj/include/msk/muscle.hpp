#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace msk {

/// Attachment point of a muscle path. link == -1 denotes the world frame.
struct ViaPoint {
    int link = -1;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();
};

struct MuscleParams {
    std::string name;
    double f_max = 1000.0;      // maximum isometric force [N]
    double l_opt = 0.1;         // optimal fiber length [m]
    double v_max = 10.0;        // max shortening velocity [l_opt/s]
    double tau_act = 0.010;     // activation time constant [s]
    double tau_deact = 0.040;   // deactivation time constant [s]
    double tendon_slack = 0.0;  // rigid tendon slack length [m]
    std::vector<ViaPoint> via_points;
};

struct MuscleState {
    double act = 0.0;  // activation in [0,1]
    double l_m = 1.0;  // normalized fiber length
    double v_m = 0.0;  // normalized fiber velocity (negative = shortening)
    double f_m = 0.0;  // current force [N]
};

// Hill curve shape constants. The anchor values (f_l(1)=1, f_v(0)=1,
// f_v(-1)=0, f_p(1)=0, eccentric plateau 1.4) are fixed; the shapes are
// smooth analytic surrogates.
inline constexpr double kForceLengthWidth = 0.45;
inline constexpr double kForceVelocityShape = 4.0;
inline constexpr double kEccentricPlateau = 1.4;
inline constexpr double kPassiveExponent = 4.0;

/// Active force-length gain, peak 1 at l_m = 1.
double force_length_active(double l_m);

/// Force-velocity gain: 0 at v_m <= -1, 1 at v_m = 0, saturating toward the
/// eccentric plateau for lengthening.
double force_velocity(double v_m);

/// Passive elastic gain: 0 for l_m <= 1, rising to 1 at l_m = 1.5.
double force_passive(double l_m);

/// Hill muscle-tendon force: f_max * (act * f_l * f_v + f_p), newtons.
double mtu_force(double act, double l_m, double v_m, const MuscleParams& params);

/// One exact-exponential step of the first-order activation dynamics with
/// the asymmetric rise/decay time constant frozen at the step start.
double activation_step(double act, double u, double dt, const MuscleParams& params);

/// The piecewise time constant tau(u, act).
double activation_time_constant(double act, double u, const MuscleParams& params);

}  // namespace msk
