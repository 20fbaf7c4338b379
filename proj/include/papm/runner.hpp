#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "papm/report.hpp"
#include "papm/scenario.hpp"

namespace papm {

/// Simulates `scenario`; when `out_dir` is non-empty writes scenario.yaml,
/// trace.csv and report.json into it.
RunReport run(const Scenario& scenario, const std::filesystem::path& out_dir = {});

struct SweepColumn {
    std::string label;  ///< "osDVS" or a CPU name
    RunReport report;
};

/// Energy/QoC comparison: osDVS baseline followed by one full-scheme run per CPU set.
struct SweepTable {
    std::vector<SweepColumn> columns;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

/// Runs the baseline and every CPU set concurrently (each simulation stays
/// single-threaded). With a non-empty `out_dir`, each run gets its own
/// subdirectory and the table is written as table.csv / table.json.
SweepTable sweep(const Scenario& base, const std::vector<CpuLevels>& cpus,
                 const std::filesystem::path& out_dir = {});

}  // namespace papm
