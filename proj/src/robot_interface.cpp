#include "quadstack/robot_interface.hpp"

#include <algorithm>
#include <cmath>

#include "quadstack/rng.hpp"

namespace quadstack {

EncoderModel random_encoder_scenario(uint64_t seed, double max_offset) {
    Rng rng(seed);
    EncoderModel enc;
    for (int j = 0; j < kNumJoints; ++j) {
        enc.true_zero[j] = rng.uniform(-M_PI, M_PI);
        enc.power_on_angle[j] = enc.true_zero[j] + rng.uniform(-max_offset, max_offset);
    }
    return enc;
}

double sweep_reference(double q, double amplitude, double t, double axis_sign) {
    return 9.0 * q * (amplitude - amplitude * std::cos(2.0 * M_PI * t)) * axis_sign;
}

namespace {

double quantize(double v, double counts_per_radian) {
    return std::round(v * counts_per_radian) / counts_per_radian;
}

void grade(const EncoderModel& enc, CalibrationResult& res) {
    res.misaligned_joints.clear();
    for (int j = 0; j < kNumJoints; ++j) {
        double err = res.found_zero[j] - enc.true_zero[j];
        res.pulse_error[j] = static_cast<int>(std::lround(err / EncoderModel::index_spacing));
        if (res.pulse_error[j] != 0) res.misaligned_joints.push_back(j);
    }
    res.status = res.misaligned_joints.empty() ? CalibrationResult::Status::ok
                                               : CalibrationResult::Status::misaligned;
}

}  // namespace

CalibrationResult soft_calibrate(const EncoderModel& enc, const RobotModel& model,
                                 const SweepParams& params) {
    CalibrationResult res;
    const double spacing = EncoderModel::index_spacing;

    for (int j = 0; j < kNumJoints; ++j) {
        // The procedure only sees incremental displacement and pulse events.
        double reading = enc.power_on_angle[j] - enc.true_zero[j];  // best estimate at power-on
        double q_seed = std::max(std::abs(reading), params.min_seed_angle);

        bool found = false;
        double d_prev = 0.0;
        for (double t = params.dt; t <= params.max_time + 1e-12 && !found; t += params.dt) {
            // Alternate the sweep direction every period so pulses on either
            // side of the power-on pose are reachable.
            double dir = (static_cast<long>(t) % 2 == 0) ? 1.0 : -1.0;
            double d = sweep_reference(q_seed, params.amplitude, t, model.axis_sign[j]) * dir;
            double lo = std::min(d_prev, d), hi = std::max(d_prev, d);
            // First index pulse inside the swept interval, in joint frame
            // relative to power-on: pulses at (true_zero - power_on) mod spacing.
            double phase = enc.true_zero[j] - enc.power_on_angle[j];
            double k_lo = std::ceil((lo - phase) / spacing - 1e-12);
            double k_hi = std::floor((hi - phase) / spacing + 1e-12);
            if (k_lo <= k_hi && hi > lo) {
                // Pick the crossing nearest the motion start.
                double best = phase + k_lo * spacing;
                double alt = phase + k_hi * spacing;
                double cross = std::abs(best - d_prev) <= std::abs(alt - d_prev) ? best : alt;
                double measured = quantize(cross, enc.counts_per_radian);
                // Snap to the lattice point nearest the power-on pose.
                double zero_rel = measured - std::round(measured / spacing) * spacing;
                res.found_zero[j] = enc.power_on_angle[j] + zero_rel;
                res.sweep_duration[j] = t;
                found = true;
            }
            d_prev = d;
        }
        if (!found)
            throw CalibrationTimeout(
                "soft_calibrate: no index pulse within " + std::to_string(params.max_time) +
                    " s on joint " + std::to_string(j),
                j);
    }
    grade(enc, res);
    return res;
}

CalibrationResult apply_index_offsets(const EncoderModel& enc, CalibrationResult res,
                                      const std::array<int, kNumJoints>& offsets) {
    for (int j = 0; j < kNumJoints; ++j) {
        res.found_zero[j] += offsets[j] * EncoderModel::index_spacing;
        res.applied_offset[j] += offsets[j];
    }
    grade(enc, res);
    return res;
}

const char* to_string(InterfacePhase phase) {
    switch (phase) {
        case InterfacePhase::Sweep: return "Sweep";
        case InterfacePhase::Hold: return "Hold";
        case InterfacePhase::Run: return "Run";
    }
    return "?";
}

const char* to_string(InterfaceEvent event) {
    switch (event) {
        case InterfaceEvent::sweep_done: return "sweep_done";
        case InterfaceEvent::user_go: return "user_go";
        case InterfaceEvent::auto_go: return "auto_go";
    }
    return "?";
}

InterfaceState state_machine_step(const InterfaceState& state, InterfaceEvent event, double now) {
    InterfaceState next = state;
    bool go = event == InterfaceEvent::user_go || event == InterfaceEvent::auto_go;
    switch (state.phase) {
        case InterfacePhase::Sweep:
            if (event == InterfaceEvent::sweep_done) {
                next.sweep_complete = true;
                return next;
            }
            if (go && state.sweep_complete) {
                next.phase = InterfacePhase::Hold;
                next.entered_at = now;
                return next;
            }
            break;
        case InterfacePhase::Hold:
            if (go) {
                next.phase = InterfacePhase::Run;
                next.entered_at = now;
                return next;
            }
            break;
        case InterfacePhase::Run:
            break;
    }
    throw IllegalTransition(std::string("illegal transition (") + to_string(state.phase) + ", " +
                            to_string(event) + ")");
}

TimingStats TimingMonitor::record(double duration_us) {
    std::lock_guard lock(mutex_);
    samples_us_.push_back(duration_us);
    sum_us_ += duration_us;
    max_us_ = std::max(max_us_, duration_us);
    if (duration_us > 1000.0) ++missed_;
    return compute_locked();
}

TimingStats TimingMonitor::stats() const {
    std::lock_guard lock(mutex_);
    return compute_locked();
}

void TimingMonitor::reset() {
    std::lock_guard lock(mutex_);
    samples_us_.clear();
    sum_us_ = 0.0;
    max_us_ = 0.0;
    missed_ = 0;
}

TimingStats TimingMonitor::compute_locked() const {
    TimingStats s;
    s.frames = static_cast<long>(samples_us_.size());
    s.missed_deadlines = missed_;
    s.max_us = max_us_;
    if (samples_us_.empty()) return s;
    s.mean_us = sum_us_ / samples_us_.size();
    std::vector<double> sorted(samples_us_);
    std::sort(sorted.begin(), sorted.end());
    size_t rank = static_cast<size_t>(std::ceil(0.99 * sorted.size()));
    s.p99_us = sorted[std::max<size_t>(rank, 1) - 1];
    return s;
}

}  // namespace quadstack
