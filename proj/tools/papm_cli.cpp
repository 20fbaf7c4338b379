// Command-line front end: run one scenario, sweep the CPU sets, or validate a file.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "papm/errors.hpp"
#include "papm/runner.hpp"
#include "papm/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitMisses = 2;
constexpr int kExitRuntime = 3;

struct Common {
    std::string scenario_path;
    std::string builtin;
};

papm::Scenario load(const Common& c) {
    if (!c.scenario_path.empty() && !c.builtin.empty()) {
        throw papm::ConfigError("use either --scenario or --builtin, not both");
    }
    if (!c.scenario_path.empty()) {
        return papm::load_scenario(c.scenario_path);
    }
    if (c.builtin.empty() || c.builtin == "table1") {
        return papm::builtin_table1();
    }
    throw papm::ConfigError("unknown builtin scenario '" + c.builtin + "'");
}

papm::CpuLevels resolve_cpu(const std::string& spec) {
    if (auto cpu = papm::find_builtin_cpu(spec)) {
        return *cpu;
    }
    if (std::filesystem::exists(spec)) {
        return papm::load_cpu_levels(spec);
    }
    throw papm::ConfigError("'" + spec + "' is neither a builtin CPU nor a readable file");
}

std::int64_t to_ticks(double value, double scale, const char* what) {
    const double v = value * scale;
    const double rounded = std::round(v);
    if (!std::isfinite(v) || std::abs(v - rounded) > 1e-6) {
        throw papm::ConfigError(std::string(what) + " must be a whole number of microseconds");
    }
    return static_cast<std::int64_t>(rounded);
}

void print_summary(const std::string& label, const papm::RunReport& r) {
    fmt::print("{:<10} E_AVG={:<9} J_SUM={:<9.6g} misses={}\n", label,
               r.e_avg ? fmt::format("{:.6g}", *r.e_avg) : std::string("null"), r.j_sum,
               r.misses);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-simulation of PID loops, EDF scheduling and voltage scaling"};
    app.require_subcommand(1);

    Common run_src;
    std::string cpu_spec;
    std::string mode_text;
    std::optional<double> duration_s;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<double> cadence_ms;
    std::optional<std::int64_t> micro_step_us;
    bool strict = false;

    auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
    run_cmd->add_option("--scenario", run_src.scenario_path, "scenario YAML file")
        ->envname("PAPM_SCENARIO");
    run_cmd->add_option("--builtin", run_src.builtin, "builtin scenario (table1)")
        ->envname("PAPM_BUILTIN");
    run_cmd->add_option("--cpu", cpu_spec, "CPU-1..CPU-4, CPU-ideal, or a levels file")
        ->envname("PAPM_CPU");
    run_cmd->add_option("--mode", mode_text, "qapm | osdvs | dvs-only")
        ->check(CLI::IsMember({"qapm", "osdvs", "dvs-only"}))
        ->envname("PAPM_MODE");
    run_cmd->add_option("--duration", duration_s, "run length [s]")->envname("PAPM_DURATION");
    run_cmd->add_option("--seed", seed, "RNG seed")->envname("PAPM_SEED");
    run_cmd->add_option("--out", out_dir, "output directory")->envname("PAPM_OUT");
    run_cmd->add_option("--trace-cadence", cadence_ms, "trace sample period [ms]")
        ->envname("PAPM_TRACE_CADENCE");
    run_cmd->add_option("--micro-step", micro_step_us, "plant integration step [us]")
        ->envname("PAPM_MICRO_STEP");
    run_cmd->add_flag("--strict", strict, "exit with code 2 on any deadline miss")
        ->envname("PAPM_STRICT");

    Common sweep_src;
    bool all_cpus = false;
    std::vector<std::string> sweep_cpus;
    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "osDVS baseline plus one run per CPU set");
    sweep_cmd->add_option("--scenario", sweep_src.scenario_path, "scenario YAML file")
        ->envname("PAPM_SCENARIO");
    sweep_cmd->add_option("--builtin", sweep_src.builtin, "builtin scenario (table1)")
        ->envname("PAPM_BUILTIN");
    sweep_cmd->add_flag("--all-cpus", all_cpus, "CPU-1..CPU-4 and CPU-ideal");
    sweep_cmd->add_option("--cpu", sweep_cpus, "CPU set (repeatable)");
    sweep_cmd->add_option("--out", sweep_out, "output directory")->envname("PAPM_OUT");

    Common validate_src;
    auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
    validate_cmd->add_option("--scenario", validate_src.scenario_path, "scenario YAML file")
        ->envname("PAPM_SCENARIO");
    validate_cmd->add_option("--builtin", validate_src.builtin, "builtin scenario (table1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run_cmd) {
            papm::Scenario s = load(run_src);
            if (!cpu_spec.empty()) s.cpu = resolve_cpu(cpu_spec);
            if (!mode_text.empty()) s.mode = *papm::parse_policy_mode(mode_text);
            if (duration_s) s.duration_us = to_ticks(*duration_s, 1e6, "--duration");
            if (seed) s.seed = *seed;
            if (cadence_ms) s.trace_cadence_us = to_ticks(*cadence_ms, 1e3, "--trace-cadence");
            if (micro_step_us) s.micro_step_us = *micro_step_us;
            papm::require_valid(s);

            const auto report = papm::run(s, out_dir);
            print_summary(papm::to_string(s.mode), report);
            if (strict && report.misses > 0) {
                return kExitMisses;
            }
            return kExitOk;
        }
        if (*sweep_cmd) {
            const papm::Scenario s = load(sweep_src);
            std::vector<papm::CpuLevels> cpus;
            if (all_cpus || sweep_cpus.empty()) {
                for (const auto& name : papm::builtin_cpu_names()) {
                    cpus.push_back(*papm::find_builtin_cpu(name));
                }
            }
            for (const auto& spec : sweep_cpus) {
                cpus.push_back(resolve_cpu(spec));
            }
            const auto table = papm::sweep(s, cpus, sweep_out);
            for (const auto& col : table.columns) {
                print_summary(col.label, col.report);
            }
            return kExitOk;
        }
        if (*validate_cmd) {
            const papm::Scenario s = load(validate_src);
            const auto errors = papm::validate(s);
            for (const auto& e : errors) {
                std::cerr << e << "\n";
            }
            if (errors.empty()) {
                std::cout << "ok\n";
                return kExitOk;
            }
            return kExitConfig;
        }
    } catch (const papm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
