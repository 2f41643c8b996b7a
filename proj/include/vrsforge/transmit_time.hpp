#ifndef VRSFORGE_TRANSMIT_TIME_HPP
#define VRSFORGE_TRANSMIT_TIME_HPP

#include <cmath>
#include <functional>

#include "vrsforge/core.hpp"
#include "vrsforge/ephemeris.hpp"

namespace vrsforge {

/// Evaluator for the composite transmit-time convention: one call at the
/// pseudo-transmit-time t_hat yields the clock offset at t_hat and the
/// position/velocity at t_bar = t_hat - clock_offset.
using SatelliteStateProvider = std::function<SatelliteState(const GnssTime& t_hat)>;

/// Production provider backed by the broadcast model.
inline SatelliteStateProvider ephemeris_provider(const BroadcastEphemeris& eph, const ClockModel& clk,
                                                 double validity_window = 4.0 * 3600.0) {
    return [eph, clk, validity_window](const GnssTime& t_hat) {
        if (eph.health != 0) throw HealthError("unhealthy satellite " + to_string(eph.sat));
        double dt = clock_offset(clk, eph, t_hat);
        GnssTime t_bar = t_hat - dt;
        double tk = t_bar - eph.toe;
        if (std::fabs(tk) > validity_window)
            throw StalenessError("ephemeris for " + to_string(eph.sat) + " outside validity window");
        auto orb = detail::kepler_orbit(eph, tk, eph.toe.tow);
        return SatelliteState{orb.position, orb.velocity, dt};
    };
}

struct SolveResult {
    double t_p = 0.0;        // propagation time, s
    double t_g = 0.0;        // geometric travel time t_p + clock_offset, s
    GnssTime t_hat;          // pseudo-transmit-time t_b - t_p
    GnssTime t_bar;          // transmit time t_b - t_p - clock_offset
    SatelliteState state;
    int iterations = 0;
    double final_residual = 0.0;  // m
};

/// Range disagreement F(t_p) = R(P_b, P(t_bar)) - c*(t_p + dt), the quantity
/// the transmit-time solver drives to zero.
inline double range_error(double t_p, const EcefPosition& base, const GnssTime& t_b,
                          const SatelliteStateProvider& provider) {
    SatelliteState st = provider(t_b - t_p);
    double r1 = sagnac_range(base, st.position);
    return r1 - constants::speed_of_light * (t_p + st.clock_offset);
}

/// Analytic derivative dF/dt_p = -(u . V + c) * (1 - a1 - 2*a2*(t_hat - toc)).
inline double range_error_derivative(double t_p, const EcefPosition& base, const GnssTime& t_b,
                                     const SatelliteStateProvider& provider, const ClockModel& clk) {
    GnssTime t_hat = t_b - t_p;
    SatelliteState st = provider(t_hat);
    double r1 = sagnac_range(base, st.position);
    Vec3 u = (1.0 / r1) * (st.position.vec() - base.vec());
    return -(dot(u, st.velocity) + constants::speed_of_light) * (1.0 - clock_drift(clk, t_hat));
}

/// Newton iteration on the propagation time. Initialized to 0.067 s; stops
/// when consecutive iterates agree to 1e-11 s.
inline SolveResult solve_satellite_state(const EcefPosition& base, const GnssTime& t_b,
                                         const SatelliteStateProvider& provider,
                                         const ClockModel& clk) {
    constexpr int max_iterations = 20;
    constexpr double tol = 1e-11;

    double t_p = 0.067;
    double t_p_prev = 0.0;
    SatelliteState st;
    double f = 0.0;
    int iterations = 0;

    while (std::fabs(t_p_prev - t_p) > tol) {
        if (++iterations > max_iterations)
            throw ConvergenceError("transmit-time solver exceeded iteration cap");

        GnssTime t_hat = t_b - t_p;
        st = provider(t_hat);
        double r1 = sagnac_range(base, st.position);
        double t_g = t_p + st.clock_offset;
        f = r1 - constants::speed_of_light * t_g;
        Vec3 u = (1.0 / r1) * (st.position.vec() - base.vec());
        double df = -(dot(u, st.velocity) + constants::speed_of_light) * (1.0 - clock_drift(clk, t_hat));
        if (std::fabs(df) < 1e-3)
            throw GeometryError("transmit-time solver: degenerate derivative");

        t_p_prev = t_p;
        t_p = t_p - f / df;
    }

    SolveResult out;
    out.t_p = t_p;
    out.t_hat = t_b - t_p;
    out.state = provider(out.t_hat);
    out.t_g = t_p + out.state.clock_offset;
    out.t_bar = t_b - out.t_g;
    out.iterations = iterations;
    out.final_residual = sagnac_range(base, out.state.position) -
                         constants::speed_of_light * out.t_g;
    return out;
}

struct SensitivityBound {
    double timing_error_bound = 0.0;    // s
    double position_shift_bound = 0.0;  // m
};

/// First-order bound on the satellite position shift caused by a transmit-time
/// error: |dP| <= |V| * |e|. About 0.8 mm for 200 ns at MEO speeds.
inline SensitivityBound transmit_sensitivity(const SatelliteState& state, double timing_error) {
    if (std::fabs(timing_error) > 1e-6)
        throw GeometryError("transmit_sensitivity: timing error beyond 1 us");
    return {std::fabs(timing_error), norm(state.velocity) * std::fabs(timing_error)};
}

}  // namespace vrsforge

#endif  // VRSFORGE_TRANSMIT_TIME_HPP
