#ifndef VRSFORGE_CORE_HPP
#define VRSFORGE_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace vrsforge {

// ---------------------------------------------------------------------------
// errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StalenessError : Error { using Error::Error; };
struct HealthError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct CoverageError : Error { using Error::Error; };
struct CodecError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// constants

namespace constants {

inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double omega_earth = 7.2921151467e-5;     // rad/s (WGS-84)
inline constexpr double seconds_per_week = 604800.0;

inline constexpr double wgs84_a = 6378137.0;               // semi-major axis, m
inline constexpr double wgs84_f = 1.0 / 298.257223563;
inline constexpr double wgs84_b = wgs84_a * (1.0 - wgs84_f);
inline constexpr double wgs84_e2 = wgs84_f * (2.0 - wgs84_f);

}  // namespace constants

/// Tunable physical parameters shared by the atmosphere models.
struct PhysicalConstants {
    double c = constants::speed_of_light;
    double omega_ie = constants::omega_earth;
    double r_e = 6371000.0;    // mean Earth radius, m
    double h_m = 350000.0;     // ionosphere shell height, m
};

enum class Constellation : std::uint8_t { Gps, Galileo, BeiDou };

inline char constellation_letter(Constellation s) {
    switch (s) {
        case Constellation::Gps: return 'G';
        case Constellation::Galileo: return 'E';
        case Constellation::BeiDou: return 'C';
    }
    return '?';
}

inline Constellation constellation_from_letter(char ch) {
    switch (ch) {
        case 'G': return Constellation::Gps;
        case 'E': return Constellation::Galileo;
        case 'C': return Constellation::BeiDou;
        default: throw ParseError(std::string("unknown constellation letter: ") + ch);
    }
}

struct SatId {
    Constellation sys = Constellation::Gps;
    int prn = 0;

    friend bool operator==(const SatId&, const SatId&) = default;
    friend auto operator<=>(const SatId&, const SatId&) = default;
};

inline std::string to_string(const SatId& id) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%c%02d", constellation_letter(id.sys), id.prn);
    return buf;
}

// ---------------------------------------------------------------------------
// small vector algebra

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend Vec3 operator*(const Vec3& v, double s) { return s * v; }
    friend Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    if (n <= 0.0) throw GeometryError("cannot normalize zero vector");
    return (1.0 / n) * v;
}

// ---------------------------------------------------------------------------
// positions and time

struct EcefPosition {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 vec() const { return {x, y, z}; }
    static EcefPosition from(const Vec3& v) { return {v.x, v.y, v.z}; }

    friend bool operator==(const EcefPosition&, const EcefPosition&) = default;
};

inline double distance(const EcefPosition& a, const EcefPosition& b) { return norm(a.vec() - b.vec()); }

/// WGS-84 geodetic coordinates; latitude/longitude in radians, altitude in m.
struct GeodeticPosition {
    double latitude = 0.0;
    double longitude = 0.0;
    double altitude = 0.0;
};

/// Constellation time: integer week plus seconds-of-week.
/// All times inside the pipeline are carried on the GPS timescale; the tag
/// records which system the value originally belonged to.
struct GnssTime {
    Constellation sys = Constellation::Gps;
    int week = 0;
    double tow = 0.0;  // [0, 604800)

    GnssTime() = default;
    GnssTime(Constellation s, int w, double t) : sys(s), week(w), tow(t) { normalize(); }
    GnssTime(int w, double t) : week(w), tow(t) { normalize(); }

    void normalize() {
        while (tow >= constants::seconds_per_week) { tow -= constants::seconds_per_week; ++week; }
        while (tow < 0.0) { tow += constants::seconds_per_week; --week; }
    }

    GnssTime operator+(double seconds) const { return GnssTime(sys, week, tow + seconds); }
    GnssTime operator-(double seconds) const { return GnssTime(sys, week, tow - seconds); }
};

/// Difference in seconds, normalized into (-302400, 302400]. The week fields
/// resolve whole-week offsets first, so the normalization only guards against
/// mismatched or unset week numbers near a rollover.
inline double operator-(const GnssTime& a, const GnssTime& b) {
    double dt = (a.week - b.week) * constants::seconds_per_week + (a.tow - b.tow);
    while (dt > constants::seconds_per_week / 2.0) dt -= constants::seconds_per_week;
    while (dt <= -constants::seconds_per_week / 2.0) dt += constants::seconds_per_week;
    return dt;
}

/// Elevation/azimuth and the receiver-to-satellite unit line of sight.
struct LookGeometry {
    double elevation = 0.0;  // rad, geodetic-normal convention
    double azimuth = 0.0;    // rad from north, clockwise
    Vec3 unit_los;           // (satellite - receiver)/range
};

// ---------------------------------------------------------------------------
// ranges

/// Earth-rotation-corrected range between a receiver and a satellite, both in
/// ECEF coordinates of their own measurement epochs:
///   R = |P_r - P_s| + (omega_ie/c) * (x_s*y_r - x_r*y_s)
inline double sagnac_range(const EcefPosition& receiver, const EcefPosition& satellite) {
    double d = distance(receiver, satellite);
    double corr = constants::omega_earth / constants::speed_of_light *
                  (satellite.x * receiver.y - receiver.x * satellite.y);
    return d + corr;
}

/// Reference formulation: rotate the satellite position into the reception
/// epoch frame through the Earth rotation accrued over the travel time, then
/// take the plain Euclidean distance.
inline double rotation_range(const EcefPosition& receiver, const EcefPosition& satellite,
                             double travel_time) {
    double theta = constants::omega_earth * travel_time;
    double c = std::cos(theta), s = std::sin(theta);
    Vec3 p = satellite.vec();
    Vec3 rotated{c * p.x + s * p.y, -s * p.x + c * p.y, p.z};
    return norm(receiver.vec() - rotated);
}

// ---------------------------------------------------------------------------
// geodetic conversions (WGS-84)

inline EcefPosition geodetic_to_ecef(const GeodeticPosition& g) {
    using namespace constants;
    double sphi = std::sin(g.latitude), cphi = std::cos(g.latitude);
    double n = wgs84_a / std::sqrt(1.0 - wgs84_e2 * sphi * sphi);
    return {(n + g.altitude) * cphi * std::cos(g.longitude),
            (n + g.altitude) * cphi * std::sin(g.longitude),
            (n * (1.0 - wgs84_e2) + g.altitude) * sphi};
}

/// Bowring's closed form followed by two fixed-point refinements.
inline GeodeticPosition ecef_to_geodetic(const EcefPosition& p) {
    using namespace constants;
    double r = norm(p.vec());
    if (r < 1.0) throw GeometryError("ecef_to_geodetic: point too close to the geocenter");

    double rho = std::hypot(p.x, p.y);
    double lon = (rho > 0.0) ? std::atan2(p.y, p.x) : 0.0;

    // reduced-latitude seed
    double beta = std::atan2(p.z * wgs84_a, rho * wgs84_b);
    double lat = std::atan2(p.z + wgs84_e2 / (1.0 - wgs84_e2) * wgs84_b * std::pow(std::sin(beta), 3),
                            rho - wgs84_e2 * wgs84_a * std::pow(std::cos(beta), 3));
    for (int i = 0; i < 2; ++i) {
        beta = std::atan2((1.0 - wgs84_f) * std::sin(lat), std::cos(lat));
        lat = std::atan2(p.z + wgs84_e2 / (1.0 - wgs84_e2) * wgs84_b * std::pow(std::sin(beta), 3),
                         rho - wgs84_e2 * wgs84_a * std::pow(std::cos(beta), 3));
    }
    double sphi = std::sin(lat);
    double n = wgs84_a / std::sqrt(1.0 - wgs84_e2 * sphi * sphi);
    double alt = (rho > 1.0) ? rho / std::cos(lat) - n : std::fabs(p.z) - wgs84_b;
    return {lat, lon, alt};
}

namespace detail {

// Rows of the ECEF-to-NED rotation at the given geodetic point.
struct NedFrame {
    Vec3 north, east, down;
};

inline NedFrame ned_frame(const GeodeticPosition& g) {
    double sphi = std::sin(g.latitude), cphi = std::cos(g.latitude);
    double slam = std::sin(g.longitude), clam = std::cos(g.longitude);
    return {{-sphi * clam, -sphi * slam, cphi},
            {-slam, clam, 0.0},
            {-cphi * clam, -cphi * slam, -sphi}};
}

}  // namespace detail

inline LookGeometry look_geometry(const EcefPosition& receiver, const EcefPosition& satellite) {
    Vec3 delta = satellite.vec() - receiver.vec();
    double range = norm(delta);
    if (range <= 0.0) throw GeometryError("look_geometry: coincident points");
    Vec3 u = (1.0 / range) * delta;

    auto frame = detail::ned_frame(ecef_to_geodetic(receiver));
    double n = dot(frame.north, u), e = dot(frame.east, u), d = dot(frame.down, u);
    LookGeometry look;
    look.unit_los = u;
    look.elevation = std::asin(std::clamp(-d, -1.0, 1.0));
    look.azimuth = std::atan2(e, n);
    return look;
}

struct NedError {
    double north = 0.0, east = 0.0, down = 0.0;

    double horizontal() const { return std::hypot(north, east); }
    double vertical() const { return std::fabs(down); }
    double norm3d() const { return std::sqrt(north * north + east * east + down * down); }
};

/// Position error of `estimate` relative to `truth`, expressed in the local
/// NED frame at the truth point.
inline NedError ned_error(const EcefPosition& truth, const EcefPosition& estimate) {
    Vec3 delta = estimate.vec() - truth.vec();
    auto frame = detail::ned_frame(ecef_to_geodetic(truth));
    return {dot(frame.north, delta), dot(frame.east, delta), dot(frame.down, delta)};
}

}  // namespace vrsforge

#endif  // VRSFORGE_CORE_HPP
