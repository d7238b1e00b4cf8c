#include "quadstack/task_env.hpp"

#include <stdexcept>

#include "quadstack/rng.hpp"

namespace quadstack {

Task task_from_string(const std::string& name) {
    if (name == "walking") return Task::walking;
    if (name == "avoidance") return Task::avoidance;
    if (name == "climbing") return Task::climbing;
    throw std::invalid_argument("unknown task '" + name + "' (walking|avoidance|climbing)");
}

std::string to_string(Task task) {
    switch (task) {
        case Task::walking: return "walking";
        case Task::avoidance: return "avoidance";
        case Task::climbing: return "climbing";
    }
    return "?";
}

Course task_course(const TaskEnvParams& params) {
    double mid_y = 0.5 * (params.n - 1) * params.resolution;
    return {0.8, mid_y, 2.8, mid_y};
}

HeightMap generate_task_env(Task task, uint64_t seed, const TaskEnvParams& params) {
    HeightMap map = make_flat_map(params.n, params.resolution);
    Rng rng(seed ^ (static_cast<uint64_t>(task) << 32));
    int n = params.n;

    switch (task) {
        case Task::walking:
            break;

        case Task::avoidance: {
            // Two single-column walls across the course with gaps on opposite
            // sides, forcing a slalom. Walls stay >= 8 columns apart and tip
            // overlap stays mild so the channel between their infeasibility
            // fringes remains wide enough to turn through.
            int col1 = rng.uniform_int(13, 14);
            int col2 = col1 + 9;
            int top1 = rng.uniform_int(n / 2 + 1, n / 2 + 4);   // wall 1 spans rows [0, top1]
            int bot2 = rng.uniform_int(n / 2 - 4, n / 2 - 1);   // wall 2 spans rows [bot2, n-1]
            for (int r = 0; r <= top1; ++r) map.at(r, col1) = params.wall_height;
            for (int r = bot2; r < n; ++r) map.at(r, col2) = params.wall_height;
            break;
        }

        case Task::climbing: {
            int n_plateaus = rng.uniform_int(1, 2);
            int col = rng.uniform_int(12, 14);
            for (int k = 0; k < n_plateaus; ++k) {
                int width = rng.uniform_int(3, 5);
                double h = rng.uniform(0.04, params.plateau_max_height);
                for (int c = col; c < std::min(col + width, n); ++c)
                    for (int r = 0; r < n; ++r) map.at(r, c) = h;
                col += width + rng.uniform_int(2, 4);
                if (col > 22) break;
            }
            break;
        }
    }
    return map;
}

}  // namespace quadstack
