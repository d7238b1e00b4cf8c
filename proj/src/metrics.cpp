#include "quadstack/metrics.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace quadstack {

double tracking_error_rate(std::span<const Vec3> refs, std::span<const Vec3> reals,
                           double f_track) {
    if (refs.size() != reals.size())
        throw std::invalid_argument("tracking_error_rate: length mismatch");
    if (refs.empty()) throw std::invalid_argument("tracking_error_rate: empty input");
    if (!(f_track > 0.0)) throw std::invalid_argument("tracking_error_rate: f_track must be > 0");
    double sum = 0.0;
    for (size_t i = 0; i < refs.size(); ++i) sum += (refs[i] - reals[i]).norm();
    return sum / static_cast<double>(refs.size()) * f_track;
}

double tracking_error_rate(const RunLog& log) {
    if (log.records.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& rec : log.records)
        sum += (rec.ref_base.position - rec.actual_base.position).norm();
    return sum / static_cast<double>(log.records.size()) * (1.0 / log.dt);
}

Outcome judge_outcome(const RunLog& log, const HeightMap& env, Vec2 goal, double goal_radius) {
    (void)env;
    if (log.fell) return Outcome::fell;
    if (log.out_of_bounds) return Outcome::out_of_bounds;
    if (!log.records.empty()) {
        const Vec3& p = log.records.back().actual_base.position;
        if ((Vec2(p.x(), p.y()) - goal).norm() <= goal_radius) return Outcome::success;
    }
    return Outcome::timeout;
}

RunSummary summarize(const RunLog& log) {
    RunSummary s;
    s.task = log.task;
    s.seed = log.seed;
    s.outcome = log.outcome;
    s.distance = log.distance_traveled;
    s.tracking_error_rate = tracking_error_rate(log);
    s.duration = log.duration;
    return s;
}

BenchmarkAggregate aggregate(const std::vector<RunSummary>& summaries) {
    BenchmarkAggregate agg;
    agg.n_runs = static_cast<int>(summaries.size());
    if (summaries.empty()) return agg;
    int successes = 0;
    for (const auto& s : summaries) {
        if (s.outcome == Outcome::success) ++successes;
        agg.mean_distance += s.distance;
        agg.mean_tracking_error_rate += s.tracking_error_rate;
    }
    agg.success_pct = 100.0 * successes / agg.n_runs;
    agg.mean_distance /= agg.n_runs;
    agg.mean_tracking_error_rate /= agg.n_runs;
    return agg;
}

BenchmarkResult benchmark(Task task, int n_runs, uint64_t seed_base, const PipelineConfig& config,
                          const SimConfig& sim_config, double time_limit) {
    if (n_runs < 1) throw std::invalid_argument("benchmark: n_runs must be >= 1");
    BenchmarkResult result;
    for (int i = 0; i < n_runs; ++i) {
        RunLog log = run_task_episode(task, seed_base + i, config, sim_config, time_limit);
        result.runs.push_back(summarize(log));
    }
    result.totals = aggregate(result.runs);
    return result;
}

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "success") return Outcome::success;
    if (s == "fell") return Outcome::fell;
    if (s == "out_of_bounds") return Outcome::out_of_bounds;
    if (s == "timeout") return Outcome::timeout;
    throw std::invalid_argument("unknown outcome '" + s + "'");
}

}  // namespace

std::string summaries_to_csv(const std::vector<RunSummary>& summaries) {
    std::string out = "task,seed,outcome,distance_m,tracking_error_rate,duration_s\n";
    for (const auto& s : summaries) {
        out += s.task + ',' + std::to_string(s.seed) + ',' + to_string(s.outcome) + ',';
        append_number(out, s.distance);
        out += ',';
        append_number(out, s.tracking_error_rate);
        out += ',';
        append_number(out, s.duration);
        out += '\n';
    }
    return out;
}

std::vector<RunSummary> parse_summaries_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty summary CSV", 1);
    std::vector<RunSummary> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> toks;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            toks.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (toks.size() != 6)
            throw ParseError("expected 6 columns at line " + std::to_string(line_no), line_no);
        RunSummary s;
        s.task = toks[0];
        s.seed = std::stoull(toks[1]);
        s.outcome = outcome_from_string(toks[2]);
        auto num = [&](const std::string& t) {
            double v;
            auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (res.ec != std::errc{})
                throw ParseError("bad number at line " + std::to_string(line_no), line_no);
            return v;
        };
        s.distance = num(toks[3]);
        s.tracking_error_rate = num(toks[4]);
        s.duration = num(toks[5]);
        out.push_back(s);
    }
    return out;
}

std::string aggregate_to_json(const BenchmarkAggregate& agg, const std::vector<RunSummary>& runs) {
    nlohmann::json j;
    j["n_runs"] = agg.n_runs;
    j["success_pct"] = agg.success_pct;
    j["mean_distance_m"] = agg.mean_distance;
    j["mean_tracking_error_rate"] = agg.mean_tracking_error_rate;
    for (const auto& s : runs) {
        nlohmann::json r;
        r["task"] = s.task;
        r["seed"] = s.seed;
        r["outcome"] = to_string(s.outcome);
        r["distance_m"] = s.distance;
        r["tracking_error_rate"] = s.tracking_error_rate;
        r["duration_s"] = s.duration;
        j["runs"].push_back(r);
    }
    if (runs.empty()) j["runs"] = nlohmann::json::array();
    return j.dump(2);
}

}  // namespace quadstack
