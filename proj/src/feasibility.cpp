#include "quadstack/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <json.hpp>
#include <queue>

namespace quadstack {

std::string FeasibilityMap::to_json() const {
    nlohmann::json j;
    j["n_rows"] = n_rows;
    j["n_cols"] = n_cols;
    j["cells"] = cells;
    return j.dump();
}

std::vector<CellIndex> detect_violations(const HeightMap& map, double threshold) {
    if (threshold <= 0.0) throw std::invalid_argument("detect_violations: threshold must be > 0");
    std::vector<CellIndex> out;
    for (int r = 0; r < map.n_rows; ++r)
        for (int c = 0; c < map.n_cols; ++c)
            if (height_deviation(map, {r, c}) > threshold) out.push_back({r, c});
    return out;
}

namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Monotone chain; strict turns only, so collinear interior points drop out.
std::vector<Vec2> monotone_chain(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a == b; }),
              pts.end());
    size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Vec2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool all_collinear(const std::vector<Vec2>& pts) {
    if (pts.size() <= 2) return true;
    for (size_t i = 2; i < pts.size(); ++i)
        if (std::abs(cross2(pts[0], pts[1], pts[i])) > 1e-12) return false;
    return true;
}

}  // namespace

std::vector<ConvexRegion> group_and_hull(const std::vector<CellIndex>& cells,
                                         const HeightMap& map) {
    std::vector<uint8_t> member(static_cast<size_t>(map.n_rows) * map.n_cols, 0);
    for (const auto& c : cells) member[static_cast<size_t>(c.row) * map.n_cols + c.col] = 1;

    std::vector<ConvexRegion> regions;
    std::vector<uint8_t> visited(member.size(), 0);
    std::vector<CellIndex> sorted(cells);
    std::sort(sorted.begin(), sorted.end());

    for (const auto& seed : sorted) {
        size_t seed_idx = static_cast<size_t>(seed.row) * map.n_cols + seed.col;
        if (visited[seed_idx]) continue;
        ConvexRegion region;
        std::queue<CellIndex> frontier;
        frontier.push(seed);
        visited[seed_idx] = 1;
        while (!frontier.empty()) {
            CellIndex cur = frontier.front();
            frontier.pop();
            region.cells.push_back(cur);
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    int r = cur.row + dr, c = cur.col + dc;
                    if (r < 0 || r >= map.n_rows || c < 0 || c >= map.n_cols) continue;
                    size_t idx = static_cast<size_t>(r) * map.n_cols + c;
                    if (!member[idx] || visited[idx]) continue;
                    visited[idx] = 1;
                    frontier.push({r, c});
                }
            }
        }
        std::sort(region.cells.begin(), region.cells.end());

        std::vector<Vec2> pts;
        pts.reserve(region.cells.size());
        Vec2 centroid(0.0, 0.0);
        for (const auto& c : region.cells) {
            auto [x, y] = cell_to_world(map, c);
            pts.emplace_back(x, y);
            centroid += pts.back();
        }
        region.centroid = centroid / static_cast<double>(pts.size());

        std::vector<Vec2> unique_pts = pts;
        std::sort(unique_pts.begin(), unique_pts.end(), [](const Vec2& a, const Vec2& b) {
            return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
        });
        unique_pts.erase(std::unique(unique_pts.begin(), unique_pts.end(),
                                     [](const Vec2& a, const Vec2& b) { return a == b; }),
                         unique_pts.end());
        if (unique_pts.size() == 1) {
            region.kind = ConvexRegion::Kind::point;
            region.hull = {unique_pts.front()};
        } else if (all_collinear(unique_pts)) {
            region.kind = ConvexRegion::Kind::segment;
            region.hull = {unique_pts.front(), unique_pts.back()};
        } else {
            region.kind = ConvexRegion::Kind::polygon;
            region.hull = monotone_chain(unique_pts);
        }
        regions.push_back(std::move(region));
    }
    return regions;
}

namespace {

// Central-difference terrain gradient at a cell (border-clamped).
Vec2 cell_gradient(const HeightMap& map, CellIndex cell) {
    int c0 = std::max(cell.col - 1, 0), c1 = std::min(cell.col + 1, map.n_cols - 1);
    int r0 = std::max(cell.row - 1, 0), r1 = std::min(cell.row + 1, map.n_rows - 1);
    double dx = (map.at(cell.row, c1) - map.at(cell.row, c0)) / ((c1 - c0) * map.resolution);
    double dy = (map.at(r1, cell.col) - map.at(r0, cell.col)) / ((r1 - r0) * map.resolution);
    if (c1 == c0) dx = 0.0;
    if (r1 == r0) dy = 0.0;
    return Vec2(dx, dy);
}

std::vector<CellIndex> probe_cells_of(const ConvexRegion& region, const HeightMap& map) {
    std::vector<uint8_t> mark(static_cast<size_t>(map.n_rows) * map.n_cols, 0);
    std::vector<CellIndex> out;
    auto add = [&](int r, int c) {
        if (r < 0 || r >= map.n_rows || c < 0 || c >= map.n_cols) return;
        size_t idx = static_cast<size_t>(r) * map.n_cols + c;
        if (mark[idx]) return;
        mark[idx] = 1;
        out.push_back({r, c});
    };
    for (const auto& cell : region.cells)
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) add(cell.row + dr, cell.col + dc);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

ProbeLabeling probe_microtrajectories(const ConvexRegion& region, const HeightMap& map,
                                      const ProbeOracle& oracle, const ProbeParams& params) {
    if (!(params.probe_length < 0.2))
        throw std::invalid_argument("probe_microtrajectories: probe_length must be < 0.2 m");

    std::vector<CellIndex> cells = probe_cells_of(region, map);
    std::vector<std::pair<bool, std::string>> results(cells.size());

    auto run_probe = [&](size_t i) {
        CellIndex cell = cells[i];
        auto [cx, cy] = cell_to_world(map, cell);
        Vec2 center(cx, cy);

        // Crossing direction: local slope if any; otherwise probe tangentially
        // to the region so flat ring cells are tested for walkability rather
        // than driven into the obstacle.
        Vec2 dir = cell_gradient(map, cell);
        if (dir.norm() < 1e-9) {
            Vec2 radial = center - region.centroid;
            dir = radial.norm() > 1e-9 ? Vec2(-radial.y(), radial.x()) : Vec2(1.0, 0.0);
        }
        dir.normalize();

        Vec2 a = center - 0.5 * params.probe_length * dir;
        Vec2 b = center + 0.5 * params.probe_length * dir;
        auto clamp_into = [&](Vec2 p) {
            double m = 1e-9;
            return Vec2(std::clamp(p.x(), map.min_x() + m, map.max_x() - m),
                        std::clamp(p.y(), map.min_y() + m, map.max_y() - m));
        };
        a = clamp_into(a);
        b = clamp_into(b);

        double yaw = std::atan2(b.y() - a.y(), b.x() - a.x());
        BodyState start, goal;
        start.position = Vec3(a.x(), a.y(), height_at_clamped(map, a.x(), a.y()) + params.standing_height);
        start.yaw = yaw;
        goal.position = Vec3(b.x(), b.y(), height_at_clamped(map, b.x(), b.y()) + params.standing_height);
        goal.yaw = yaw;
        try {
            ProbeResult pr = oracle(start, goal);
            results[i] = {pr.feasible, pr.reason};
        } catch (const std::exception& e) {
            results[i] = {false, std::string("probe failed: ") + e.what()};
        }
    };

    int n_threads = std::max(1, params.n_threads);
    if (n_threads == 1 || cells.size() < 2) {
        for (size_t i = 0; i < cells.size(); ++i) run_probe(i);
    } else {
        std::vector<std::future<void>> futs;
        size_t chunk = (cells.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            size_t lo = t * chunk, hi = std::min(cells.size(), lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (size_t i = lo; i < hi; ++i) run_probe(i);
            }));
        }
        for (auto& f : futs) f.get();
    }

    ProbeLabeling out;
    for (size_t i = 0; i < cells.size(); ++i) {
        out.labels[cells[i]] = results[i].first;
        if (!results[i].first) out.reasons[cells[i]] = results[i].second;
    }
    return out;
}

FeasibilityMap build_feasibility_map(const HeightMap& map, double threshold,
                                     const ProbeOracle& oracle, const ProbeParams& params) {
    FeasibilityMap fmap;
    fmap.n_rows = map.n_rows;
    fmap.n_cols = map.n_cols;
    fmap.cells.assign(static_cast<size_t>(map.n_rows) * map.n_cols, 1);

    auto violations = detect_violations(map, threshold);
    auto regions = group_and_hull(violations, map);
    for (const auto& region : regions) {
        ProbeLabeling labeling = probe_microtrajectories(region, map, oracle, params);
        for (const auto& [cell, feasible] : labeling.labels) {
            // Conservative merge when regions' rings overlap.
            bool cur = fmap.traversable(cell.row, cell.col);
            fmap.set(cell.row, cell.col, cur && feasible);
        }
    }
    return fmap;
}

ProbeOracle make_gait_oracle(std::shared_ptr<const HeightMap> terrain, const GaitPattern& pattern,
                             const RobotModel& model, const PlannerParams& planner_params) {
    return [terrain, pattern, model, planner_params](const BodyState& start,
                                                     const BodyState& goal) -> ProbeResult {
        GaitPlan plan = plan_gait(start, goal, terrain, pattern, model, planner_params);
        FeasibilityVerdict v = check_feasibility(plan, model, *terrain, planner_params);
        ProbeResult pr;
        pr.feasible = v.feasible;
        if (!v.feasible) {
            for (const auto& r : v.reasons) {
                if (!pr.reason.empty()) pr.reason += "; ";
                pr.reason += r;
            }
        }
        return pr;
    };
}

}  // namespace quadstack
