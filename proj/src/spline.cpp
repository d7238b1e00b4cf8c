#include "quadstack/spline.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace quadstack {

CubicSpline1D::CubicSpline1D(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    size_t n = knots_.size();
    if (n < 2 || values_.size() != n)
        throw std::invalid_argument("CubicSpline1D: need >= 2 matching knots/values");
    for (size_t i = 1; i < n; ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw std::invalid_argument("CubicSpline1D: knots must be strictly increasing");

    m_.assign(n, 0.0);
    if (n == 2) return;

    // Thomas solve of the natural-spline tridiagonal system.
    size_t ni = n - 2;
    std::vector<double> diag(ni), rhs(ni), upper(ni);
    for (size_t i = 0; i < ni; ++i) {
        double h0 = knots_[i + 1] - knots_[i];
        double h1 = knots_[i + 2] - knots_[i + 1];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((values_[i + 2] - values_[i + 1]) / h1 -
                        (values_[i + 1] - values_[i]) / h0);
    }
    for (size_t i = 1; i < ni; ++i) {
        double lower = knots_[i + 1] - knots_[i];
        double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[ni] = rhs[ni - 1] / diag[ni - 1];
    for (size_t i = ni - 1; i-- > 0;) m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
}

size_t CubicSpline1D::interval_of(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    size_t i = static_cast<size_t>(std::distance(knots_.begin(), it));
    if (i == 0) return 0;
    return std::min(i - 1, knots_.size() - 2);
}

double CubicSpline1D::value(double t) const {
    size_t i = interval_of(t);
    double h = knots_[i + 1] - knots_[i];
    double a = (knots_[i + 1] - t) / h;
    double b = (t - knots_[i]) / h;
    return a * values_[i] + b * values_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline1D::deriv(double t) const {
    size_t i = interval_of(t);
    double h = knots_[i + 1] - knots_[i];
    double a = (knots_[i + 1] - t) / h;
    double b = (t - knots_[i]) / h;
    return (values_[i + 1] - values_[i]) / h +
           h / 6.0 * (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]);
}

double CubicSpline1D::deriv2(double t) const {
    size_t i = interval_of(t);
    double h = knots_[i + 1] - knots_[i];
    double a = (knots_[i + 1] - t) / h;
    double b = (t - knots_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

std::array<double, 4> CubicSpline1D::coefficients(size_t i) const {
    double h = knots_[i + 1] - knots_[i];
    double c0 = values_[i];
    double c1 = (values_[i + 1] - values_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    double c2 = m_[i] / 2.0;
    double c3 = (m_[i + 1] - m_[i]) / (6.0 * h);
    return {c0, c1, c2, c3};
}

namespace {

constexpr int kSubSamples = 32;  // arc-length table resolution per knot interval

}  // namespace

GlobalPath fit_spline_points(const std::vector<Vec2>& pts) {
    if (pts.size() < 2) throw std::invalid_argument("fit_spline: need at least 2 points");

    std::vector<double> tau(pts.size()), xs(pts.size()), ys(pts.size());
    tau[0] = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        xs[i] = pts[i].x();
        ys[i] = pts[i].y();
        if (i > 0) {
            double chord = (pts[i] - pts[i - 1]).norm();
            if (chord <= 0.0)
                throw std::invalid_argument("fit_spline: coincident consecutive points");
            tau[i] = tau[i - 1] + chord;
        }
    }

    GlobalPath path;
    path.knots = pts;
    path.x = CubicSpline1D(tau, xs);
    path.y = CubicSpline1D(tau, ys);

    // Cumulative arc length by Simpson's rule on each table sub-interval.
    auto speed = [&](double t) {
        double dx = path.x.deriv(t), dy = path.y.deriv(t);
        return std::hypot(dx, dy);
    };
    path.table_tau.push_back(0.0);
    path.table_s.push_back(0.0);
    path.table_pos.emplace_back(path.x.value(0.0), path.y.value(0.0));
    path.knot_s.assign(pts.size(), 0.0);
    double s = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double t0 = tau[i], t1 = tau[i + 1];
        double h = (t1 - t0) / kSubSamples;
        for (int k = 0; k < kSubSamples; ++k) {
            double a = t0 + k * h, b = a + h;
            s += h / 6.0 * (speed(a) + 4.0 * speed(0.5 * (a + b)) + speed(b));
            path.table_tau.push_back(b);
            path.table_s.push_back(s);
            path.table_pos.emplace_back(path.x.value(b), path.y.value(b));
        }
        path.knot_s[i + 1] = s;
    }
    path.total_length = s;
    return path;
}

GlobalPath fit_spline(const std::vector<CellIndex>& cells, const HeightMap& map) {
    if (cells.size() < 2)
        throw std::invalid_argument("fit_spline: degenerate path of fewer than 2 cells");

    // Prune interior points of straight runs (exact integer test).
    std::vector<CellIndex> kept;
    kept.push_back(cells.front());
    for (size_t i = 1; i + 1 < cells.size(); ++i) {
        int dr1 = cells[i].row - cells[i - 1].row, dc1 = cells[i].col - cells[i - 1].col;
        int dr2 = cells[i + 1].row - cells[i].row, dc2 = cells[i + 1].col - cells[i].col;
        if (dr1 * dc2 != dr2 * dc1) kept.push_back(cells[i]);
    }
    kept.push_back(cells.back());

    std::vector<Vec2> pts;
    pts.reserve(kept.size());
    for (const auto& c : kept) {
        auto [x, y] = cell_to_world(map, c);
        pts.emplace_back(x, y);
    }
    return fit_spline_points(pts);
}

double GlobalPath::tau_of_arc(double s) const {
    s = std::clamp(s, 0.0, total_length);
    auto it = std::lower_bound(table_s.begin(), table_s.end(), s);
    size_t i = static_cast<size_t>(std::distance(table_s.begin(), it));
    if (i == 0) return table_tau.front();
    if (i >= table_s.size()) return table_tau.back();
    double s0 = table_s[i - 1], s1 = table_s[i];
    double u = s1 > s0 ? (s - s0) / (s1 - s0) : 0.0;
    return table_tau[i - 1] + u * (table_tau[i] - table_tau[i - 1]);
}

Vec2 GlobalPath::point_at(double s) const {
    double t = tau_of_arc(s);
    return Vec2(x.value(t), y.value(t));
}

Vec2 GlobalPath::tangent_at(double s) const {
    double t = tau_of_arc(s);
    Vec2 d(x.deriv(t), y.deriv(t));
    double n = d.norm();
    return n > 1e-12 ? Vec2(d / n) : Vec2(1.0, 0.0);
}

double GlobalPath::heading_at(double s) const {
    Vec2 t = tangent_at(s);
    return std::atan2(t.y(), t.x());
}

double GlobalPath::project(double px, double py) const {
    Vec2 p(px, py);
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < table_pos.size(); ++i) {
        double d = (table_pos[i] - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    // Golden-section refinement between the neighbors of the best sample.
    double lo = table_tau[best > 0 ? best - 1 : 0];
    double hi = table_tau[std::min(best + 1, table_tau.size() - 1)];
    auto dist2 = [&](double t) {
        double dx = x.value(t) - px, dy = y.value(t) - py;
        return dx * dx + dy * dy;
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    for (int it = 0; it < 40 && (b - a) > 1e-10; ++it) {
        if (dist2(c) < dist2(d)) {
            b = d;
            d = c;
            c = b - phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + phi * (b - a);
        }
    }
    double t_best = 0.5 * (a + b);
    // Convert back to arc length via the table.
    auto it = std::lower_bound(table_tau.begin(), table_tau.end(), t_best);
    size_t i = static_cast<size_t>(std::distance(table_tau.begin(), it));
    if (i == 0) return table_s.front();
    if (i >= table_tau.size()) return table_s.back();
    double t0 = table_tau[i - 1], t1 = table_tau[i];
    double u = t1 > t0 ? (t_best - t0) / (t1 - t0) : 0.0;
    return table_s[i - 1] + u * (table_s[i] - table_s[i - 1]);
}

std::string GlobalPath::to_json() const {
    nlohmann::json j;
    for (const auto& k : knots) j["knots"].push_back({k.x(), k.y()});
    j["knot_arc_lengths"] = knot_s;
    j["total_length"] = total_length;
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        nlohmann::json seg;
        seg["tau0"] = x.knots()[i];
        seg["tau1"] = x.knots()[i + 1];
        seg["x"] = x.coefficients(i);
        seg["y"] = y.coefficients(i);
        j["intervals"].push_back(seg);
    }
    return j.dump();
}

}  // namespace quadstack
