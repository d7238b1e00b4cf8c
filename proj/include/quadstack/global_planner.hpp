#pragma once

#include "quadstack/gait.hpp"
#include "quadstack/spline.hpp"

namespace quadstack {

// Look-ahead segmentation state: how far along the global spline each local
// segment reaches, and which segment is active.
struct StitchSchedule {
    double step_size = 0.3;  // m of look-ahead per segment
    int current_segment = 0;
    int solved_segments = 0;  // segments queued/consumed so far
};

struct SegmentGoal {
    BodyState start;
    BodyState goal;
    double s_goal = 0.0;  // arc length of the goal on the spline
    bool at_end = false;  // goal clamped to the spline end
};

// Start = current state; goal = spline point step_size ahead of the current
// arc-length projection, z from terrain + standing height, yaw along the
// spline tangent.
SegmentGoal next_segment_goal(const GlobalPath& path, const BodyState& current,
                              const StitchSchedule& schedule, const HeightMap& map,
                              double standing_height);

struct StitchError : std::runtime_error {
    double max_discrepancy;
    StitchError(const std::string& msg, double d) : std::runtime_error(msg), max_discrepancy(d) {}
};

// Concatenate two plans at a full-contact node of `current`. The head of
// `next` must match the seam node within `tolerance` (base position/yaw and
// foot positions). The result keeps `current` up to the seam and appends
// `next` time-shifted; continuity at the seam is exact by construction.
GaitPlan stitch(const GaitPlan& current, const GaitPlan& next, double at, double tolerance = 1e-6);

struct ReplanDecision {
    bool replan = false;
    BodyState start;  // full-contact start state for the new segment
};

// Replan when the tracked base has drifted beyond the threshold from the
// plan reference at time t.
ReplanDecision replan_trigger(const BodyState& current, const GaitPlan& plan, double t,
                              double deviation_threshold, const HeightMap& map,
                              double standing_height);

}  // namespace quadstack
