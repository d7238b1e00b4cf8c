#pragma once

#include <optional>
#include <string>

#include "quadstack/episode.hpp"

namespace quadstack {

// Flat run configuration shared by the CLI subcommands. Values resolve with
// flag > config file > default precedence.
struct RunConfig {
    // Environment: exactly one of map_path / task must be set for a run.
    std::string map_path;
    std::string task;
    uint64_t seed = 0;

    std::optional<std::array<double, 2>> start;
    std::optional<std::array<double, 2>> goal;

    double time_limit = 60.0;
    std::string out_dir = ".";
    std::string mode = "onboard_pd";  // onboard_pd | torque

    double cycle_duration = 2.0;
    double duty_factor = 0.6;
    double full_stance_fraction = 0.15;
    double step_height = 0.05;

    double kp = 3.0;
    double kd = 0.05;

    double ik_lambda = 1.0;
    double ik_tolerance = 1e-4;
    int ik_max_iterations = 50;
    double ik_damping = 1e-6;

    double fss_threshold = 0.1;
    double probe_length = 0.15;
    int fss_threads = 1;

    double step_size = 0.3;
    double replan_deviation = 0.1;
    double goal_radius = 0.15;

    std::string robot_model_path;

    PipelineConfig to_pipeline_config() const;
    void validate_for_run() const;  // throws on conflicts / missing env
};

// Defaults overlaid with the JSON document; unknown keys are rejected.
RunConfig apply_config_json(RunConfig base, const std::string& json_text);

// Parse the file at path on top of the defaults.
RunConfig load_config(const std::string& path);

}  // namespace quadstack
