#pragma once

#include <string>

#include "quadstack/heightmap.hpp"

namespace quadstack {

enum class Task { walking, avoidance, climbing };

Task task_from_string(const std::string& name);
std::string to_string(Task task);

struct TaskEnvParams {
    int n = 50;                       // grid is n x n
    double resolution = 0.1;          // m
    double wall_height = 1.0;         // avoidance walls
    double plateau_max_height = 0.06; // climbing plateaus stay below max step height
};

// Deterministic in (task, seed). walking: flat. avoidance: flat plus two
// wall segments with a traversable gap each. climbing: one or two elevated
// bands crossing the course, low enough to step onto.
HeightMap generate_task_env(Task task, uint64_t seed, const TaskEnvParams& params = {});

// Canonical start/goal (x, y) used by the simulation harness: a 2 m course
// through the middle of the generated environment.
struct Course {
    double start_x, start_y;
    double goal_x, goal_y;
};
Course task_course(const TaskEnvParams& params = {});

}  // namespace quadstack
