#ifndef VRSFORGE_TROPOSPHERE_HPP
#define VRSFORGE_TROPOSPHERE_HPP

#include <array>
#include <cmath>
#include <vector>

#include "vrsforge/core.hpp"

namespace vrsforge {

/// Zenith-delay Fourier coefficients: mean, annual, semi-annual terms (m).
struct ZtdCoefficients {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
};

/// Empirical per-node model: a0(h) = exp(sum alpha_i h^i) and
/// a_j(h) = sum beta_{j,i} h^i + c_poly, evaluated with h in the grid's
/// declared height unit.
struct IggTropNode {
    std::vector<double> alpha;            // degree m >= 1, so at least two terms
    std::array<std::array<double, 6>, 4> beta{};  // beta[j-1][i], j in 1..4
    double c_poly = 0.0;
};

struct IggTropGrid {
    std::vector<double> lats;  // deg, strictly increasing
    std::vector<double> lons;  // deg, strictly increasing
    std::vector<IggTropNode> nodes;  // row-major, lat-major
    double height_unit_m = 1000.0;   // meters per height unit (km by default)

    const IggTropNode& node(std::size_t i_lat, std::size_t i_lon) const {
        return nodes[i_lat * lons.size() + i_lon];
    }
    bool empty() const { return nodes.empty(); }
};

/// Mapping function M(E) = 1.001 / sqrt(0.002001 + sin^2 E); exactly 1 at zenith.
inline double tropo_mapping(double elevation) {
    if (elevation <= 0.0) throw GeometryError("tropo_mapping: satellite below horizon");
    double s = std::sin(elevation);
    return 1.001 / std::sqrt(0.002001 + s * s);
}

/// Zenith delay at a real-valued day of year; gamma = 2*pi/365.25.
inline double ztd(const ZtdCoefficients& c, double t_days) {
    constexpr double gamma = 2.0 * 3.14159265358979323846 / 365.25;
    return c.a0 + c.a1 * std::cos(gamma * t_days) + c.a2 * std::sin(gamma * t_days) +
           c.a3 * std::cos(2.0 * gamma * t_days) + c.a4 * std::sin(2.0 * gamma * t_days);
}

inline double slant_tropo(double elevation, double zenith_delay) {
    return tropo_mapping(elevation) * zenith_delay;
}

namespace detail {

struct CellIndex {
    std::size_t i0, i1;
    double frac;  // 0 at node i0, 1 at node i1
};

inline CellIndex bracket(const std::vector<double>& axis, double value, bool wrap_lon) {
    if (axis.size() < 2) throw CoverageError("grid axis needs at least two nodes");
    if (value >= axis.front() && value <= axis.back()) {
        std::size_t hi = 1;
        while (hi + 1 < axis.size() && axis[hi] < value) ++hi;
        double span = axis[hi] - axis[hi - 1];
        return {hi - 1, hi, (value - axis[hi - 1]) / span};
    }
    if (wrap_lon) {
        // seam cell between the last and first node across +-180
        double last = axis.back(), first = axis.front();
        double span = first + 360.0 - last;
        double v = value < first ? value + 360.0 : value;
        if (v >= last && v <= last + span)
            return {axis.size() - 1, 0, (v - last) / span};
    }
    throw CoverageError("query point outside grid hull");
}

}  // namespace detail

/// ZTD coefficients at a position: the empirical height models are evaluated
/// at the four surrounding nodes, then interpolated bilinearly.
inline ZtdCoefficients iggtrop_coeffs(const IggTropGrid& grid, const GeodeticPosition& pos) {
    if (grid.empty()) throw CoverageError("troposphere grid not loaded");

    double lat_deg = pos.latitude * 180.0 / 3.14159265358979323846;
    double lon_deg = pos.longitude * 180.0 / 3.14159265358979323846;
    auto la = detail::bracket(grid.lats, lat_deg, false);
    auto lo = detail::bracket(grid.lons, lon_deg, true);

    double h = pos.altitude / grid.height_unit_m;

    auto eval_node = [&](const IggTropNode& n) {
        ZtdCoefficients c;
        double acc = 0.0, hp = 1.0;
        for (double a : n.alpha) { acc += a * hp; hp *= h; }
        c.a0 = std::exp(acc);
        double* out[4] = {&c.a1, &c.a2, &c.a3, &c.a4};
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            hp = 1.0;
            for (int i = 0; i < 6; ++i) { s += n.beta[j][i] * hp; hp *= h; }
            *out[j] = s + n.c_poly;
        }
        return c;
    };

    ZtdCoefficients c00 = eval_node(grid.node(la.i0, lo.i0));
    ZtdCoefficients c01 = eval_node(grid.node(la.i0, lo.i1));
    ZtdCoefficients c10 = eval_node(grid.node(la.i1, lo.i0));
    ZtdCoefficients c11 = eval_node(grid.node(la.i1, lo.i1));

    auto blend = [&](double v00, double v01, double v10, double v11) {
        double a = v00 + (v01 - v00) * lo.frac;
        double b = v10 + (v11 - v10) * lo.frac;
        return a + (b - a) * la.frac;
    };
    return {blend(c00.a0, c01.a0, c10.a0, c11.a0),
            blend(c00.a1, c01.a1, c10.a1, c11.a1),
            blend(c00.a2, c01.a2, c10.a2, c11.a2),
            blend(c00.a3, c01.a3, c10.a3, c11.a3),
            blend(c00.a4, c01.a4, c10.a4, c11.a4)};
}

}  // namespace vrsforge

#endif  // VRSFORGE_TROPOSPHERE_HPP
