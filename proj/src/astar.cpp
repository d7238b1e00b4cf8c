#include "quadstack/astar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace quadstack {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double octile(CellIndex a, CellIndex b) {
    double dr = std::abs(a.row - b.row);
    double dc = std::abs(a.col - b.col);
    return std::max(dr, dc) + (kSqrt2 - 1.0) * std::min(dr, dc);
}

struct QueueEntry {
    double f;
    double h;
    int idx;  // row-major cell index
};

struct EntryGreater {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.h != b.h) return a.h > b.h;
        return a.idx > b.idx;
    }
};

}  // namespace

std::optional<AStarResult> astar(const FeasibilityMap& fmap, CellIndex start, CellIndex goal) {
    auto in_grid = [&](CellIndex c) {
        return c.row >= 0 && c.row < fmap.n_rows && c.col >= 0 && c.col < fmap.n_cols;
    };
    if (!in_grid(start) || !in_grid(goal))
        throw std::invalid_argument("astar: start/goal outside the grid");
    if (!fmap.traversable(start.row, start.col))
        throw std::invalid_argument("astar: start cell is not traversable");
    if (!fmap.traversable(goal.row, goal.col))
        throw std::invalid_argument("astar: goal cell is not traversable");

    const int n = fmap.n_rows * fmap.n_cols;
    auto to_idx = [&](CellIndex c) { return c.row * fmap.n_cols + c.col; };
    auto to_cell = [&](int idx) { return CellIndex{idx / fmap.n_cols, idx % fmap.n_cols}; };

    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<uint8_t> closed(n, 0);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, EntryGreater> open;

    int start_idx = to_idx(start), goal_idx = to_idx(goal);
    g[start_idx] = 0.0;
    open.push({octile(start, goal), octile(start, goal), start_idx});

    static constexpr int dr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static constexpr int dc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

    while (!open.empty()) {
        QueueEntry top = open.top();
        open.pop();
        if (closed[top.idx]) continue;
        closed[top.idx] = 1;
        if (top.idx == goal_idx) break;
        CellIndex cur = to_cell(top.idx);
        for (int k = 0; k < 8; ++k) {
            CellIndex nb{cur.row + dr[k], cur.col + dc[k]};
            if (!in_grid(nb) || !fmap.traversable(nb.row, nb.col)) continue;
            bool diagonal = dr[k] != 0 && dc[k] != 0;
            if (diagonal) {
                // No corner cutting: both adjacent axis cells must be free.
                if (!fmap.traversable(cur.row + dr[k], cur.col) ||
                    !fmap.traversable(cur.row, cur.col + dc[k]))
                    continue;
            }
            double step = diagonal ? kSqrt2 : 1.0;
            double cand = g[top.idx] + step;
            int nb_idx = to_idx(nb);
            if (cand < g[nb_idx]) {
                g[nb_idx] = cand;
                parent[nb_idx] = top.idx;
                double h = octile(nb, goal);
                open.push({cand + h, h, nb_idx});
            }
        }
    }

    if (!closed[goal_idx]) return std::nullopt;

    AStarResult result;
    result.cost = g[goal_idx];
    for (int idx = goal_idx; idx != -1; idx = parent[idx]) result.path.push_back(to_cell(idx));
    std::reverse(result.path.begin(), result.path.end());
    return result;
}

}  // namespace quadstack
