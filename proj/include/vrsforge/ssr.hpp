#ifndef VRSFORGE_SSR_HPP
#define VRSFORGE_SSR_HPP

#include <array>
#include <cmath>
#include <string>

#include "vrsforge/core.hpp"
#include "vrsforge/ephemeris.hpp"

namespace vrsforge {

struct OrbitCorrection {
    SatId sat;
    int iod = 0;
    GnssTime t_o;
    Vec3 delta_o;      // radial/along/cross, m
    Vec3 delta_o_dot;  // radial/along/cross, m/s
};

struct ClockCorrection {
    SatId sat;
    int iod = 0;
    GnssTime t_c;
    double c0 = 0.0;  // m
    double c1 = 0.0;  // m/s
    double c2 = 0.0;  // m/s^2
};

struct CodeBias {
    SatId sat;
    std::string obs_type;  // RINEX-style, e.g. "C1C"
    double bias = 0.0;     // m
};

struct CorrectedSatellite {
    EcefPosition position_tilde;
    double ephem_range_error = 0.0;      // m
    double clock_error_correction = 0.0; // s
};

/// Orthonormal radial/along-track/cross-track basis at a satellite state.
/// Rows: radial = along x cross, along = V/|V|, cross = (P x V)/|P x V|.
struct RacFrame {
    Vec3 radial, along, cross;
};

inline RacFrame radial_along_cross_frame(const SatelliteState& state) {
    Vec3 p = state.position.vec();
    Vec3 v = state.velocity;
    if (norm(p) <= 0.0 || norm(v) <= 0.0)
        throw GeometryError("radial_along_cross_frame: zero position or velocity");
    Vec3 pv = cross(p, v);
    if (norm(pv) <= 1e-9 * norm(p) * norm(v))
        throw GeometryError("radial_along_cross_frame: position parallel to velocity");
    Vec3 along = normalized(v);
    Vec3 crosst = normalized(pv);
    Vec3 radial = cross(along, crosst);
    return {radial, along, crosst};
}

/// SSR orbit correction: delta = dO + dOdot*(t - t_o) in the RAC frame, mapped
/// to ECEF and subtracted from the broadcast position.
inline EcefPosition apply_orbit_correction(const SatelliteState& state, const OrbitCorrection& corr,
                                           const GnssTime& t, int ephemeris_iod,
                                           double staleness_window = 120.0) {
    if (corr.iod != ephemeris_iod)
        throw StalenessError("orbit correction IOD " + std::to_string(corr.iod) +
                             " does not match ephemeris IOD " + std::to_string(ephemeris_iod));
    double age = t - corr.t_o;
    if (std::fabs(age) > staleness_window)
        throw StalenessError("orbit correction for " + to_string(corr.sat) + " is stale");

    Vec3 rac = corr.delta_o + age * corr.delta_o_dot;
    RacFrame f = radial_along_cross_frame(state);
    Vec3 ecef = rac.x * f.radial + rac.y * f.along + rac.z * f.cross;
    return EcefPosition::from(state.position.vec() - ecef);
}

/// E_b = R(P_b, P_tilde) - R(P_b, P_hat), both through the Sagnac range.
inline double ephemeris_range_error(const EcefPosition& base, const EcefPosition& p_tilde,
                                    const EcefPosition& p_hat) {
    return sagnac_range(base, p_tilde) - sagnac_range(base, p_hat);
}

/// SSR clock polynomial in meters. The quadratic term uses (t - t_c)^2; set
/// linear_c2 to evaluate C2*(t - t_c) instead for comparison.
inline double clock_correction_value(const ClockCorrection& corr, const GnssTime& t_s,
                                     double staleness_window = 120.0, bool linear_c2 = false) {
    double dt = t_s - corr.t_c;
    if (std::fabs(dt) > staleness_window)
        throw StalenessError("clock correction for " + to_string(corr.sat) + " is stale");
    double quad = linear_c2 ? corr.c2 * dt : corr.c2 * dt * dt;
    return corr.c0 + corr.c1 * dt + quad;
}

/// Satellite clock error correction in seconds: delta_t_hat = -deltaC/c.
inline double clock_error_correction(double delta_c_meters) {
    return -delta_c_meters / constants::speed_of_light;
}

/// OSB correction of a measured observation: O' = O - B.
inline double apply_code_bias(double observation, const CodeBias& bias) {
    return observation - bias.bias;
}

}  // namespace vrsforge

#endif  // VRSFORGE_SSR_HPP
