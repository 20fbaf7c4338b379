#pragma once

#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "papm/kernel.hpp"
#include "papm/scenario.hpp"

namespace papm {

struct LoopReport {
    int loop = 0;
    double iae = 0.0;
    std::size_t jobs = 0;
    std::size_t misses = 0;
    double period_min_ms = 0.0;
    double period_max_ms = 0.0;
    double period_mean_ms = 0.0;
};

/// End-of-run metrics. Immutable once produced by finalize().
struct RunReport {
    std::string scenario;
    std::string mode;
    std::string cpu;
    double duration_s = 0.0;
    std::vector<LoopReport> loops;
    double j_sum = 0.0;
    std::optional<double> e_avg;  ///< empty for a zero-length run
    std::size_t misses = 0;
    std::vector<std::pair<double, double>> utilization;    ///< (t [s], U)
    std::vector<std::pair<double, double>> speed_changes;  ///< (t [s], alpha)
};

RunReport finalize(const Scenario& scenario, const SimResult& result);

/// Rounds to six significant digits, the precision of every reported number.
double round_sig6(double v);

nlohmann::json to_json(const RunReport& report);
std::string report_json_text(const RunReport& report);

/// Header plus one row per (sample, loop):
/// time_s,loop,r,y,e,u,h_eff_ms,alpha,energy_inst
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace papm
