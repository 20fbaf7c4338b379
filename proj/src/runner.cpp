#include "papm/runner.hpp"

#include <fmt/format.h>

#include <fstream>
#include <future>

#include "papm/errors.hpp"
#include "papm/kernel.hpp"

namespace papm {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << text;
}

}  // namespace

RunReport run(const Scenario& scenario, const std::filesystem::path& out_dir) {
    Simulator sim(scenario);
    const SimResult result = sim.run();
    RunReport report = finalize(scenario, result);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text(out_dir / "scenario.yaml", dump_scenario(scenario));
        std::ofstream trace(out_dir / "trace.csv", std::ios::binary);
        if (!trace) {
            throw ConfigError("cannot write '" + (out_dir / "trace.csv").string() + "'");
        }
        write_trace_csv(trace, result.trace);
        write_text(out_dir / "report.json", report_json_text(report));
    }
    return report;
}

std::string SweepTable::to_csv() const {
    std::string out = "index";
    for (const auto& c : columns) {
        out += "," + c.label;
    }
    out += "\nE_AVG";
    for (const auto& c : columns) {
        out += c.report.e_avg ? fmt::format(",{:.6g}", *c.report.e_avg) : std::string(",");
    }
    out += "\nJ_SUM";
    for (const auto& c : columns) {
        out += fmt::format(",{:.6g}", c.report.j_sum);
    }
    return out + "\n";
}

nlohmann::json SweepTable::to_json() const {
    using nlohmann::json;
    json j;
    json labels = json::array();
    json energy = json::object();
    json cost = json::object();
    json misses = json::object();
    json loop_iae = json::object();
    for (const auto& c : columns) {
        labels.push_back(c.label);
        energy[c.label] = c.report.e_avg ? json(round_sig6(*c.report.e_avg)) : json(nullptr);
        cost[c.label] = round_sig6(c.report.j_sum);
        misses[c.label] = c.report.misses;
        json per_loop = json::array();
        for (const auto& l : c.report.loops) {
            per_loop.push_back(round_sig6(l.iae));
        }
        loop_iae[c.label] = std::move(per_loop);
    }
    j["columns"] = std::move(labels);
    j["E_AVG"] = std::move(energy);
    j["J_SUM"] = std::move(cost);
    j["IAE"] = std::move(loop_iae);
    j["deadline_misses"] = std::move(misses);
    return j;
}

SweepTable sweep(const Scenario& base, const std::vector<CpuLevels>& cpus,
                 const std::filesystem::path& out_dir) {
    std::vector<std::pair<std::string, Scenario>> runs;
    Scenario baseline = base;
    baseline.mode = PolicyMode::OsDvs;
    baseline.cpu = CpuLevels::continuous();
    runs.emplace_back("osDVS", baseline);
    for (const auto& cpu : cpus) {
        Scenario s = base;
        s.mode = PolicyMode::Qapm;
        s.cpu = cpu;
        runs.emplace_back(cpu.name, std::move(s));
    }
    for (const auto& [label, s] : runs) {
        require_valid(s);
    }

    std::vector<std::future<RunReport>> pending;
    pending.reserve(runs.size());
    for (const auto& [label, s] : runs) {
        const auto dir = out_dir.empty() ? std::filesystem::path{} : out_dir / label;
        pending.push_back(std::async(std::launch::async,
                                     [&scenario = s, dir] { return run(scenario, dir); }));
    }

    SweepTable table;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        table.columns.push_back({runs[i].first, pending[i].get()});
    }
    if (!out_dir.empty()) {
        write_text(out_dir / "table.csv", table.to_csv());
        write_text(out_dir / "table.json", table.to_json().dump(2) + "\n");
    }
    return table;
}

}  // namespace papm
