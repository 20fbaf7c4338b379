#include "papm/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace papm {

double round_sig6(double v) {
    if (!std::isfinite(v) || v == 0.0) {
        return v;
    }
    return std::stod(fmt::format("{:.6g}", v));
}

RunReport finalize(const Scenario& scenario, const SimResult& result) {
    RunReport rep;
    rep.scenario = scenario.name;
    rep.mode = to_string(scenario.mode);
    rep.cpu = scenario.mode == PolicyMode::OsDvs ? "CPU-ideal" : scenario.cpu.name;
    rep.duration_s = static_cast<double>(result.duration) * kTickSeconds;

    const std::size_t n = scenario.loops.size();
    rep.loops.resize(n);
    std::vector<double> period_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rep.loops[i].loop = static_cast<int>(i) + 1;
        rep.loops[i].iae = result.duration > 0 ? result.iae.loop(i) : 0.0;
        rep.loops[i].period_min_ms = std::numeric_limits<double>::infinity();
    }
    for (const auto& job : result.jobs) {
        auto& lr = rep.loops[job.task];
        const double period_ms = static_cast<double>(job.deadline - job.release) / 1e3;
        ++lr.jobs;
        lr.misses += job.missed ? 1 : 0;
        lr.period_min_ms = std::min(lr.period_min_ms, period_ms);
        lr.period_max_ms = std::max(lr.period_max_ms, period_ms);
        period_sum[job.task] += period_ms;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& lr = rep.loops[i];
        if (lr.jobs == 0) {
            lr.period_min_ms = 0.0;
        } else {
            lr.period_mean_ms = period_sum[i] / static_cast<double>(lr.jobs);
        }
        rep.j_sum += lr.iae;
    }

    rep.e_avg = result.energy.average();
    rep.misses = result.misses.size();
    for (const auto& [t, u] : result.utilization) {
        rep.utilization.emplace_back(static_cast<double>(t) * kTickSeconds, u);
    }
    for (const auto& [t, a] : result.energy.changes()) {
        rep.speed_changes.emplace_back(static_cast<double>(t) * kTickSeconds, a);
    }
    return rep;
}

nlohmann::json to_json(const RunReport& r) {
    using nlohmann::json;
    json j;
    j["scenario"] = r.scenario;
    j["mode"] = r.mode;
    j["cpu"] = r.cpu;
    j["duration_s"] = round_sig6(r.duration_s);
    j["E_AVG"] = r.e_avg ? json(round_sig6(*r.e_avg)) : json(nullptr);
    j["J_SUM"] = round_sig6(r.j_sum);
    j["deadline_misses"] = r.misses;
    json loops = json::array();
    for (const auto& l : r.loops) {
        loops.push_back({{"loop", l.loop},
                         {"IAE", round_sig6(l.iae)},
                         {"jobs", l.jobs},
                         {"deadline_misses", l.misses},
                         {"period_min_ms", round_sig6(l.period_min_ms)},
                         {"period_max_ms", round_sig6(l.period_max_ms)},
                         {"period_mean_ms", round_sig6(l.period_mean_ms)}});
    }
    j["loops"] = std::move(loops);
    json util = json::array();
    for (const auto& [t, u] : r.utilization) {
        util.push_back({round_sig6(t), round_sig6(u)});
    }
    j["utilization"] = std::move(util);
    json speeds = json::array();
    for (const auto& [t, a] : r.speed_changes) {
        speeds.push_back({round_sig6(t), round_sig6(a)});
    }
    j["speed_changes"] = std::move(speeds);
    return j;
}

std::string report_json_text(const RunReport& report) {
    return to_json(report).dump(2) + "\n";
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << "time_s,loop,r,y,e,u,h_eff_ms,alpha,energy_inst\n";
    fmt::memory_buffer buf;
    for (const auto& row : rows) {
        buf.clear();
        fmt::format_to(std::back_inserter(buf), "{:.6f},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.6g},{:.9g},{:.9g}\n",
                       static_cast<double>(row.time) * kTickSeconds, row.loop, row.r, row.y, row.e,
                       row.u, row.h_eff_ms, row.alpha, row.energy);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

}  // namespace papm
