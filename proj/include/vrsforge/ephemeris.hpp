#ifndef VRSFORGE_EPHEMERIS_HPP
#define VRSFORGE_EPHEMERIS_HPP

#include <cmath>

#include "vrsforge/core.hpp"

namespace vrsforge {

namespace constants {

// per-ICD gravitational parameter and Earth rotation rate
inline constexpr double mu_gps = 3.986005e14;
inline constexpr double mu_gal = 3.986004418e14;
inline constexpr double mu_bds = 3.986004418e14;
inline constexpr double omega_bds = 7.292115e-5;

inline double mu(Constellation s) {
    switch (s) {
        case Constellation::Gps: return mu_gps;
        case Constellation::Galileo: return mu_gal;
        case Constellation::BeiDou: return mu_bds;
    }
    return mu_gps;
}

inline double node_rate(Constellation s) {
    return s == Constellation::BeiDou ? omega_bds : omega_earth;
}

}  // namespace constants

struct ClockModel {
    double a0 = 0.0;  // s
    double a1 = 0.0;  // s/s
    double a2 = 0.0;  // s/s^2
    GnssTime toc;
};

struct BroadcastEphemeris {
    SatId sat;
    int iod = 0;
    GnssTime toe;
    double sqrt_a = 0.0;   // m^(1/2)
    double e = 0.0;
    double i0 = 0.0;       // rad
    double omega0 = 0.0;   // rad
    double omega = 0.0;    // argument of perigee, rad
    double m0 = 0.0;       // rad
    double delta_n = 0.0;  // rad/s
    double idot = 0.0;     // rad/s
    double omegadot = 0.0; // rad/s
    double cuc = 0.0, cus = 0.0;  // rad
    double cic = 0.0, cis = 0.0;  // rad
    double crc = 0.0, crs = 0.0;  // m
    int health = 0;

    /// BeiDou GEO satellites use the inclined-frame formulation (C01-C05, C59-C63).
    bool is_beidou_geo() const {
        return sat.sys == Constellation::BeiDou &&
               ((sat.prn >= 1 && sat.prn <= 5) || (sat.prn >= 59 && sat.prn <= 63));
    }
};

struct SatelliteState {
    EcefPosition position;
    Vec3 velocity;            // m/s
    double clock_offset = 0.0;  // s, polynomial + relativistic
};

/// Solve Kepler's equation E - e*sin(E) = M for the eccentric anomaly.
/// Newton from E = M, with a bisection fallback should Newton wander.
inline double kepler_solve(double mean_anomaly, double e) {
    if (e < 0.0 || e >= 0.1) throw GeometryError("kepler_solve: eccentricity out of range");

    double m = mean_anomaly;
    double ecc = m;
    for (int i = 0; i < 30; ++i) {
        double f = ecc - e * std::sin(ecc) - m;
        if (std::fabs(f) <= 1e-13) return ecc;
        double step = f / (1.0 - e * std::cos(ecc));
        if (!std::isfinite(step) || std::fabs(step) > 1.0) break;
        ecc -= step;
    }
    if (std::fabs(ecc - e * std::sin(ecc) - m) <= 1e-13) return ecc;

    // bisection on [m - e, m + e], which always brackets the root
    double lo = m - std::fabs(e) - 1e-9, hi = m + std::fabs(e) + 1e-9;
    auto residual = [&](double x) { return x - e * std::sin(x) - m; };
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0) hi = mid; else lo = mid;
        if (std::fabs(residual(mid)) <= 1e-13) return mid;
    }
    throw ConvergenceError("kepler_solve: no convergence");
}

/// Clock polynomial slope a1 + 2*a2*(t - toc); feeds the solver derivative.
inline double clock_drift(const ClockModel& clk, const GnssTime& t) {
    double dt = t - clk.toc;
    return clk.a1 + 2.0 * clk.a2 * dt;
}

/// Broadcast clock offset: polynomial plus the relativistic correction
/// F*e*sqrt(A)*sin(Ek) with F = -2*sqrt(mu)/c^2.
inline double clock_offset(const ClockModel& clk, const BroadcastEphemeris& eph, const GnssTime& t) {
    double dt = t - clk.toc;
    double poly = clk.a0 + clk.a1 * dt + clk.a2 * dt * dt;

    double rel = 0.0;
    if (eph.e > 0.0) {
        double mu = constants::mu(eph.sat.sys);
        double a = eph.sqrt_a * eph.sqrt_a;
        double n = std::sqrt(mu / (a * a * a)) + eph.delta_n;
        double mk = eph.m0 + n * (t - eph.toe);
        double ek = kepler_solve(mk, eph.e);
        double f_rel = -2.0 * std::sqrt(mu) / (constants::speed_of_light * constants::speed_of_light);
        rel = f_rel * eph.e * eph.sqrt_a * std::sin(ek);
    }
    return poly + rel;
}

/// BeiDou IOD convention shared by the SSR providers: floor(toe/720) mod 240.
inline int beidou_iod(long toe_seconds) {
    return static_cast<int>((toe_seconds / 720) % 240);
}

namespace detail {

struct OrbitEval {
    EcefPosition position;
    Vec3 velocity;
};

/// ICD Kepler propagation with analytic velocity. `tk` is t - toe wrapped into
/// a half week; `toe_tow` enters the node rotation absolutely.
inline OrbitEval kepler_orbit(const BroadcastEphemeris& eph, double tk, double toe_tow) {
    const double mu = constants::mu(eph.sat.sys);
    const double omega_e = constants::node_rate(eph.sat.sys);
    const double a = eph.sqrt_a * eph.sqrt_a;
    const double n = std::sqrt(mu / (a * a * a)) + eph.delta_n;

    const double mk = eph.m0 + n * tk;
    const double ek = kepler_solve(mk, eph.e);
    const double sek = std::sin(ek), cek = std::cos(ek);
    const double one_m_ecos = 1.0 - eph.e * cek;
    const double ekdot = n / one_m_ecos;

    const double sq1e2 = std::sqrt(1.0 - eph.e * eph.e);
    const double nu = std::atan2(sq1e2 * sek, cek - eph.e);
    const double phi = nu + eph.omega;
    const double phidot = sq1e2 * ekdot / one_m_ecos;

    const double s2p = std::sin(2.0 * phi), c2p = std::cos(2.0 * phi);
    const double uk = phi + eph.cus * s2p + eph.cuc * c2p;
    const double rk = a * one_m_ecos + eph.crc * c2p + eph.crs * s2p;
    const double ik = eph.i0 + eph.idot * tk + eph.cic * c2p + eph.cis * s2p;

    const double ukdot = phidot * (1.0 + 2.0 * (eph.cus * c2p - eph.cuc * s2p));
    const double rkdot = a * eph.e * sek * ekdot + 2.0 * phidot * (eph.crs * c2p - eph.crc * s2p);
    const double ikdot = eph.idot + 2.0 * phidot * (eph.cis * c2p - eph.cic * s2p);

    const double suk = std::sin(uk), cuk = std::cos(uk);
    const double xp = rk * cuk, yp = rk * suk;
    const double xpdot = rkdot * cuk - yp * ukdot;
    const double ypdot = rkdot * suk + xp * ukdot;

    const double sik = std::sin(ik), cik = std::cos(ik);

    if (eph.is_beidou_geo()) {
        // GEO: propagate the node without the Earth-rate term, then rotate the
        // inclined-frame position through -5 deg about x and omega_e*tk about z.
        const double ok = eph.omega0 + eph.omegadot * tk - omega_e * toe_tow;
        const double okdot = eph.omegadot;
        const double sok = std::sin(ok), cok = std::cos(ok);

        Vec3 pg{xp * cok - yp * cik * sok,
                xp * sok + yp * cik * cok,
                yp * sik};
        Vec3 vg{xpdot * cok - ypdot * cik * sok + yp * sik * ikdot * sok - pg.y * okdot,
                xpdot * sok + ypdot * cik * cok - yp * sik * ikdot * cok + pg.x * okdot,
                ypdot * sik + yp * cik * ikdot};

        const double angle = -5.0 * std::acos(-1.0) / 180.0;
        const double sx = std::sin(angle), cx = std::cos(angle);
        Vec3 pr{pg.x, cx * pg.y + sx * pg.z, -sx * pg.y + cx * pg.z};
        Vec3 vr{vg.x, cx * vg.y + sx * vg.z, -sx * vg.y + cx * vg.z};

        const double theta = omega_e * tk;
        const double st = std::sin(theta), ct = std::cos(theta);
        Vec3 p{ct * pr.x + st * pr.y, -st * pr.x + ct * pr.y, pr.z};
        Vec3 dz{ -st * pr.x + ct * pr.y, -ct * pr.x - st * pr.y, 0.0};
        Vec3 v{ct * vr.x + st * vr.y + omega_e * dz.x,
               -st * vr.x + ct * vr.y + omega_e * dz.y,
               vr.z};
        return {EcefPosition::from(p), v};
    }

    const double ok = eph.omega0 + (eph.omegadot - omega_e) * tk - omega_e * toe_tow;
    const double okdot = eph.omegadot - omega_e;
    const double sok = std::sin(ok), cok = std::cos(ok);

    EcefPosition pos{xp * cok - yp * cik * sok,
                     xp * sok + yp * cik * cok,
                     yp * sik};
    const double tmp = ypdot * cik - yp * sik * ikdot;
    Vec3 vel{-okdot * pos.y + xpdot * cok - tmp * sok,
             okdot * pos.x + xpdot * sok + tmp * cok,
             yp * cik * ikdot + ypdot * sik};
    return {pos, vel};
}

}  // namespace detail

/// Evaluate the full broadcast model at time t: ICD orbit, analytic velocity,
/// and the clock offset (polynomial + relativistic).
inline SatelliteState eval_ephemeris(const BroadcastEphemeris& eph, const ClockModel& clk,
                                     const GnssTime& t, double validity_window = 4.0 * 3600.0) {
    if (eph.health != 0)
        throw HealthError("unhealthy satellite " + to_string(eph.sat));
    double tk = t - eph.toe;
    if (std::fabs(tk) > validity_window)
        throw StalenessError("ephemeris for " + to_string(eph.sat) + " outside validity window");

    auto orb = detail::kepler_orbit(eph, tk, eph.toe.tow);
    return {orb.position, orb.velocity, clock_offset(clk, eph, t)};
}

}  // namespace vrsforge

#endif  // VRSFORGE_EPHEMERIS_HPP
