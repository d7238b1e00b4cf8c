#pragma once

#include <string>
#include <vector>

#include "quadstack/core.hpp"
#include "quadstack/heightmap.hpp"

namespace quadstack {

// Natural cubic spline through (knot, value) pairs; zero second derivative
// at the ends, C2 in the knot parameter.
class CubicSpline1D {
public:
    CubicSpline1D() = default;
    CubicSpline1D(std::vector<double> knots, std::vector<double> values);

    double value(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& second_derivs() const { return m_; }
    // Polynomial coefficients on interval i: v(dt) = c[0] + c[1] dt + c[2] dt^2 + c[3] dt^3.
    std::array<double, 4> coefficients(size_t interval) const;

private:
    size_t interval_of(double t) const;
    std::vector<double> knots_, values_, m_;
};

// Planar path spline in chord-length parameter with an arc-length lookup
// table; queried by arc length s in [0, total_length].
struct GlobalPath {
    std::vector<Vec2> knots;
    CubicSpline1D x, y;            // functions of chord parameter tau
    std::vector<double> knot_s;    // arc length at knots
    double total_length = 0.0;

    Vec2 point_at(double s) const;
    Vec2 tangent_at(double s) const;   // unit tangent
    double heading_at(double s) const;
    // Arc length of the point on the path closest to (px, py).
    double project(double px, double py) const;

    std::string to_json() const;

    // Dense tau->s samples used for inversion and projection.
    std::vector<double> table_tau, table_s;
    std::vector<Vec2> table_pos;
    double tau_of_arc(double s) const;
};

// Spline through the world coordinates of a grid path, with collinear runs
// pruned first. Throws on paths shorter than two cells.
GlobalPath fit_spline(const std::vector<CellIndex>& path, const HeightMap& map);

GlobalPath fit_spline_points(const std::vector<Vec2>& pts);

}  // namespace quadstack
