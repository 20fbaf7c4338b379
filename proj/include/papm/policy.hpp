#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace papm {

/// Error-to-period mapping parameters shared by all loops unless overridden.
struct AdaptationParams {
    double beta = 40.0;
    double e_min = 0.02;
    double e_max = 0.3;

    bool operator==(const AdaptationParams&) const = default;
};

/// Static timing attributes of one control task. Times are in microseconds.
struct TaskSpec {
    int id = 0;
    double c_nom = 0.0;  ///< execution time at full speed
    double h0 = 0.0;     ///< nominal (shortest) period
    double h_max = 0.0;  ///< longest period the loop tolerates
    AdaptationParams adaptation;

    bool operator==(const TaskSpec&) const = default;
};

/// Discrete speed set of a multiple-voltage processor, or a continuously
/// scalable one when `ideal` is set (levels are then ignored).
struct CpuLevels {
    std::string name;
    std::vector<double> levels;
    bool ideal = false;

    static CpuLevels continuous(std::string name = "CPU-ideal");

    double lowest() const;

    bool operator==(const CpuLevels&) const = default;
};

/// Outcome of one power-manager invocation.
struct PolicyDecision {
    double alpha_ideal = 0.0;
    double alpha = 0.0;
    double u_expected = 0.0;  ///< alpha_ideal / alpha, before reclaiming
    std::vector<double> base_periods;
    std::vector<double> effective_periods;

    bool operator==(const PolicyDecision&) const = default;
};

/// Which stages of the power manager run.
enum class PolicyMode {
    Qapm,     ///< period adaptation + voltage scaling + reclaiming
    OsDvs,    ///< fixed nominal periods, continuous speed
    DvsOnly,  ///< fixed nominal periods, quantized speed, no reclaiming
};

std::string to_string(PolicyMode mode);
std::optional<PolicyMode> parse_policy_mode(const std::string& text);

/// Throws ConfigError when the parameters or timing attributes are inconsistent.
void check_task_spec(const TaskSpec& spec);
void check_cpu_levels(const CpuLevels& cpu);

/// Multiplier applied to h0 for absolute control error `e`.
///
/// Equals h_max/h0 at or below e_min, 1 at or above e_max, and decays
/// exponentially (rate beta) in between. Continuous at both thresholds.
double period_scale_factor(double e, const TaskSpec& spec);

/// Base sampling period for error `e`: period_scale_factor(e) * h0.
double adapt_period(double e, const TaskSpec& spec);

/// Workload sum(c_i / h_i); also the lowest speed that keeps EDF feasible.
double ideal_speed(std::span<const double> c_nom, std::span<const double> periods);

/// Lowest available speed not below `alpha_ideal` (or the lowest level when
/// alpha_ideal is under it). Levels within 1e-12 of alpha_ideal count as equal.
double quantize_speed(double alpha_ideal, const CpuLevels& cpu);

/// Shrinks every period by alpha_ideal/alpha so the CPU is fully used at `alpha`.
std::vector<double> reclaim_periods(std::span<const double> base_periods, double alpha_ideal,
                                    double alpha);

/// Snapshot the power manager sees when task `trigger` releases a job.
struct PolicyInput {
    std::span<const TaskSpec> tasks;
    std::span<const double> c_nom;  ///< current execution demand per task
    std::span<const double> base_periods;
    std::size_t trigger = 0;
    double error = 0.0;  ///< |r - y| sampled for the triggering loop
};

/// Runs the three stages in order for one job release.
///
/// Only the triggering loop's base period is re-adapted; the others keep
/// their last base period. Reclaiming always scales base periods, never
/// previously reclaimed ones.
PolicyDecision policy_step(const PolicyInput& in, const CpuLevels& cpu,
                           PolicyMode mode = PolicyMode::Qapm);

}  // namespace papm
