#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "papm/pid.hpp"
#include "papm/plant.hpp"
#include "papm/policy.hpp"

namespace papm {

/// One control loop: plant, controller and task timing (microsecond ticks).
struct LoopConfig {
    TransferFunction plant;
    PidGains gains;
    std::int64_t c_nom_us = 0;
    std::int64_t h0_us = 0;
    std::int64_t h_max_us = 0;
    std::optional<AdaptationParams> adaptation;  ///< overrides Scenario::adaptation

    bool operator==(const LoopConfig&) const = default;
};

/// Multiplicative execution-time variation drawn per job from [low, high].
struct JitterRange {
    double low = 1.0;
    double high = 1.0;

    bool operator==(const JitterRange&) const = default;
};

/// Instant at which a job reads its plant for the controller: at release, or
/// when the job first gets the CPU. Period adaptation always uses the release sample.
enum class SamplingPoint { Release, Start };

std::string to_string(SamplingPoint p);
std::optional<SamplingPoint> parse_sampling_point(const std::string& text);

struct Scenario {
    std::string name = "custom";
    std::vector<LoopConfig> loops;
    AdaptationParams adaptation;
    CpuLevels cpu = CpuLevels::continuous();
    PolicyMode mode = PolicyMode::Qapm;
    std::int64_t duration_us = 12'000'000;
    std::int64_t perturbation_interval_us = 1'000'000;
    std::int64_t micro_step_us = 100;
    std::int64_t trace_cadence_us = 1'000;
    std::uint64_t seed = 0;
    std::optional<JitterRange> c_jitter;
    std::int64_t switch_overhead_us = 0;
    SamplingPoint sampling = SamplingPoint::Release;

    std::vector<TaskSpec> task_specs() const;

    bool operator==(const Scenario&) const = default;
};

/// The four-loop benchmark: plants, PID gains and timing of the reference setup.
Scenario builtin_table1();

/// CPU-1..CPU-4 and CPU-ideal, keyed by name.
std::map<std::string, CpuLevels> builtin_cpus();
/// Names in presentation order: CPU-1, CPU-2, CPU-3, CPU-4, CPU-ideal.
std::vector<std::string> builtin_cpu_names();
std::optional<CpuLevels> find_builtin_cpu(const std::string& name);

/// Every violated invariant, each prefixed with its field path. Empty when valid.
std::vector<std::string> validate(const Scenario& s);
/// Throws ConfigError listing all problems.
void require_valid(const Scenario& s);

/// YAML text <-> Scenario. Parse errors carry line and column.
Scenario parse_scenario(const std::string& text);
std::string dump_scenario(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

/// A standalone speed-level file ("name", "levels", "ideal").
CpuLevels parse_cpu_levels(const std::string& text);
CpuLevels load_cpu_levels(const std::string& path);

}  // namespace papm
