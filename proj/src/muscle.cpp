#include "msk/muscle.hpp"

#include <cmath>

#include "msk/errors.hpp"

namespace msk {

double force_length_active(double l_m) {
    if (!(l_m > 0.0)) throw DomainError("force_length_active: l_m must be > 0");
    const double d = (l_m - 1.0) / kForceLengthWidth;
    return std::exp(-d * d);
}

double force_velocity(double v_m) {
    if (v_m <= -1.0) return 0.0;
    if (v_m < 0.0) {
        // Concentric hyperbola, zero at v = -1, slope (1 + 1/k) at v = 0.
        return (v_m + 1.0) / (1.0 - v_m / kForceVelocityShape);
    }
    // Eccentric branch chosen C1-continuous with the concentric slope at 0
    // and saturating at the plateau.
    const double slope0 = 1.0 + 1.0 / kForceVelocityShape;
    const double c = (kEccentricPlateau - 1.0) / slope0;
    return (kEccentricPlateau * v_m + c) / (v_m + c);
}

double force_passive(double l_m) {
    if (!(l_m > 0.0)) throw DomainError("force_passive: l_m must be > 0");
    if (l_m <= 1.0) return 0.0;
    const double num = std::exp(kPassiveExponent * (l_m - 1.0)) - 1.0;
    const double den = std::exp(kPassiveExponent * 0.5) - 1.0;
    return num / den;
}

double mtu_force(double act, double l_m, double v_m, const MuscleParams& params) {
    if (!(act >= 0.0 && act <= 1.0)) throw DomainError("mtu_force: act must lie in [0,1]");
    return params.f_max *
           (act * force_length_active(l_m) * force_velocity(v_m) + force_passive(l_m));
}

double activation_time_constant(double act, double u, const MuscleParams& params) {
    const double gain = 0.5 + 1.5 * act;
    return u > act ? params.tau_act * gain : params.tau_deact / gain;
}

double activation_step(double act, double u, double dt, const MuscleParams& params) {
    if (!(act >= 0.0 && act <= 1.0)) throw DomainError("activation_step: act must lie in [0,1]");
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("activation_step: u must lie in [0,1]");
    if (!(dt > 0.0)) throw DomainError("activation_step: dt must be > 0");
    const double tau = activation_time_constant(act, u, params);
    double next = u + (act - u) * std::exp(-dt / tau);
    if (next < 0.0) next = 0.0;
    if (next > 1.0) next = 1.0;
    return next;
}

}  // namespace msk
