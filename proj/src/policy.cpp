#include "papm/policy.hpp"

#include <algorithm>
#include <cmath>

#include "papm/errors.hpp"

namespace papm {

namespace {

constexpr double kLevelTolerance = 1e-12;

}  // namespace

CpuLevels CpuLevels::continuous(std::string name) {
    return CpuLevels{std::move(name), {1.0}, true};
}

double CpuLevels::lowest() const {
    if (ideal || levels.empty()) {
        return 0.0;
    }
    return levels.front();
}

std::string to_string(PolicyMode mode) {
    switch (mode) {
        case PolicyMode::Qapm:
            return "qapm";
        case PolicyMode::OsDvs:
            return "osdvs";
        case PolicyMode::DvsOnly:
            return "dvs-only";
    }
    return "unknown";
}

std::optional<PolicyMode> parse_policy_mode(const std::string& text) {
    if (text == "qapm") return PolicyMode::Qapm;
    if (text == "osdvs") return PolicyMode::OsDvs;
    if (text == "dvs-only") return PolicyMode::DvsOnly;
    return std::nullopt;
}

void check_task_spec(const TaskSpec& spec) {
    const auto& a = spec.adaptation;
    if (!(a.beta > 0.0) || !std::isfinite(a.beta)) {
        throw ConfigError("task " + std::to_string(spec.id) + ": beta must be positive");
    }
    if (!(a.e_min >= 0.0) || !(a.e_min < a.e_max) || !std::isfinite(a.e_max)) {
        throw ConfigError("task " + std::to_string(spec.id) + ": need 0 <= e_min < e_max");
    }
    if (!(spec.c_nom > 0.0) || !(spec.c_nom <= spec.h0) || !(spec.h0 <= spec.h_max) ||
        !std::isfinite(spec.h_max)) {
        throw ConfigError("task " + std::to_string(spec.id) + ": need 0 < c_nom <= h0 <= h_max");
    }
}

void check_cpu_levels(const CpuLevels& cpu) {
    if (cpu.ideal) {
        return;
    }
    if (cpu.levels.empty()) {
        throw ConfigError(cpu.name + ": no speed levels");
    }
    if (!(cpu.levels.front() > 0.0)) {
        throw ConfigError(cpu.name + ": levels must be positive");
    }
    for (std::size_t m = 1; m < cpu.levels.size(); ++m) {
        if (!(cpu.levels[m - 1] < cpu.levels[m])) {
            throw ConfigError(cpu.name + ": levels not ascending");
        }
    }
    if (cpu.levels.back() != 1.0) {
        throw ConfigError(cpu.name + ": highest level must be 1.0");
    }
}

double period_scale_factor(double e, const TaskSpec& spec) {
    check_task_spec(spec);
    if (!std::isfinite(e) || e < 0.0) {
        throw InputError("control error must be finite and non-negative");
    }
    const auto& a = spec.adaptation;
    const double max_scale = spec.h_max / spec.h0;
    if (e <= a.e_min) {
        return max_scale;
    }
    if (e >= a.e_max) {
        return 1.0;
    }
    const double floor_term = std::exp(-a.beta * a.e_max);
    const double weight =
        (std::exp(-a.beta * e) - floor_term) / (std::exp(-a.beta * a.e_min) - floor_term);
    return std::clamp(weight * (max_scale - 1.0) + 1.0, 1.0, max_scale);
}

double adapt_period(double e, const TaskSpec& spec) {
    return period_scale_factor(e, spec) * spec.h0;
}

double ideal_speed(std::span<const double> c_nom, std::span<const double> periods) {
    if (c_nom.empty() || c_nom.size() != periods.size()) {
        throw ConfigError("ideal_speed: need one period per task and at least one task");
    }
    double workload = 0.0;
    for (std::size_t i = 0; i < c_nom.size(); ++i) {
        if (!(periods[i] > 0.0)) {
            throw InputError("ideal_speed: periods must be positive");
        }
        workload += c_nom[i] / periods[i];
    }
    return workload;
}

double quantize_speed(double alpha_ideal, const CpuLevels& cpu) {
    if (!std::isfinite(alpha_ideal) || alpha_ideal <= 0.0) {
        throw InputError("quantize_speed: ideal speed must be positive");
    }
    if (alpha_ideal > 1.0 + kLevelTolerance) {
        throw SchedulabilityError("ideal speed " + std::to_string(alpha_ideal) + " exceeds 1");
    }
    if (cpu.ideal) {
        return std::min(alpha_ideal, 1.0);
    }
    for (double level : cpu.levels) {
        if (level >= alpha_ideal - kLevelTolerance) {
            return level;
        }
    }
    return cpu.levels.back();
}

std::vector<double> reclaim_periods(std::span<const double> base_periods, double alpha_ideal,
                                    double alpha) {
    if (!(alpha > 0.0)) {
        throw InputError("reclaim_periods: speed must be positive");
    }
    const double factor = alpha_ideal / alpha;
    std::vector<double> out(base_periods.begin(), base_periods.end());
    for (double& h : out) {
        h *= factor;
    }
    return out;
}

PolicyDecision policy_step(const PolicyInput& in, const CpuLevels& cpu, PolicyMode mode) {
    const std::size_t n = in.tasks.size();
    if (n == 0 || in.c_nom.size() != n || in.base_periods.size() != n || in.trigger >= n) {
        throw ConfigError("policy_step: inconsistent task snapshot");
    }

    PolicyDecision d;
    d.base_periods.assign(in.base_periods.begin(), in.base_periods.end());
    if (mode == PolicyMode::Qapm) {
        d.base_periods[in.trigger] = adapt_period(in.error, in.tasks[in.trigger]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            d.base_periods[i] = in.tasks[i].h0;
        }
    }

    d.alpha_ideal = ideal_speed(in.c_nom, d.base_periods);
    if (mode == PolicyMode::OsDvs) {
        d.alpha = quantize_speed(d.alpha_ideal, CpuLevels::continuous());
    } else {
        d.alpha = quantize_speed(d.alpha_ideal, cpu);
    }
    d.u_expected = d.alpha_ideal / d.alpha;

    if (mode == PolicyMode::Qapm) {
        d.effective_periods = reclaim_periods(d.base_periods, d.alpha_ideal, d.alpha);
    } else {
        d.effective_periods = d.base_periods;
    }
    return d;
}

}  // namespace papm
