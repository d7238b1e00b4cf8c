#pragma once

#include <span>
#include <string>
#include <vector>

#include "quadstack/episode.hpp"

namespace quadstack {

// Mean per-sample Euclidean error between reference and realized positions,
// scaled by the tracking rate: (sum_i ||ref_i - real_i|| / n) * f_track.
double tracking_error_rate(std::span<const Vec3> refs, std::span<const Vec3> reals,
                           double f_track);

double tracking_error_rate(const RunLog& log);

// Precedence: fell > out_of_bounds > success (final base within goal_radius)
// > timeout.
Outcome judge_outcome(const RunLog& log, const HeightMap& env, Vec2 goal, double goal_radius);

struct RunSummary {
    std::string task;
    uint64_t seed = 0;
    Outcome outcome = Outcome::timeout;
    double distance = 0.0;             // m
    double tracking_error_rate = 0.0;  // m/s
    double duration = 0.0;             // s
};

RunSummary summarize(const RunLog& log);

struct BenchmarkAggregate {
    int n_runs = 0;
    double success_pct = 0.0;
    double mean_distance = 0.0;
    double mean_tracking_error_rate = 0.0;
};

BenchmarkAggregate aggregate(const std::vector<RunSummary>& summaries);

// Seeded benchmark over run_task_episode: seeds seed_base .. seed_base+n-1.
struct BenchmarkResult {
    std::vector<RunSummary> runs;
    BenchmarkAggregate totals;
};
BenchmarkResult benchmark(Task task, int n_runs, uint64_t seed_base, const PipelineConfig& config,
                          const SimConfig& sim_config, double time_limit);

// Machine-readable report pair; parse_summaries_csv inverts summaries_to_csv.
std::string summaries_to_csv(const std::vector<RunSummary>& summaries);
std::vector<RunSummary> parse_summaries_csv(const std::string& csv);
std::string aggregate_to_json(const BenchmarkAggregate& agg, const std::vector<RunSummary>& runs);

}  // namespace quadstack
