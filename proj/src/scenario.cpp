#include "papm/scenario.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "papm/errors.hpp"

namespace papm {

std::vector<TaskSpec> Scenario::task_specs() const {
    std::vector<TaskSpec> out;
    out.reserve(loops.size());
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const auto& l = loops[i];
        out.push_back(TaskSpec{static_cast<int>(i) + 1, static_cast<double>(l.c_nom_us),
                               static_cast<double>(l.h0_us), static_cast<double>(l.h_max_us),
                               l.adaptation.value_or(adaptation)});
    }
    return out;
}

Scenario builtin_table1() {
    Scenario s;
    s.name = "table1";
    s.adaptation = AdaptationParams{40.0, 0.02, 0.3};
    s.loops = {
        {{{1.0}, {50.0, 1000.0}}, {1e4, 400.0, 0.0}, 2'000, 10'000, 40'000, std::nullopt},
        {{{1.0}, {20.0, 10.0, 1.0}}, {30.0, 70.0, 0.0}, 2'000, 7'000, 30'000, std::nullopt},
        {{{1.0}, {10.0, 6.0, 0.5}}, {100.0, 200.0, 2.0}, 2'000, 8'000, 30'000, std::nullopt},
        {{{1.0}, {20.0, 10.0, 1.0}}, {200.0, 350.0, 3.0}, 2'000, 9'000, 40'000, std::nullopt},
    };
    s.cpu = CpuLevels::continuous();
    s.mode = PolicyMode::Qapm;
    s.duration_us = 12'000'000;
    s.perturbation_interval_us = 1'000'000;
    return s;
}

std::map<std::string, CpuLevels> builtin_cpus() {
    std::map<std::string, CpuLevels> cpus;
    cpus["CPU-1"] = {"CPU-1", {0.5, 1.0}, false};
    cpus["CPU-2"] = {"CPU-2", {0.45, 0.64, 0.92, 1.0}, false};
    cpus["CPU-3"] = {"CPU-3", {0.36, 0.55, 0.64, 0.73, 0.82, 0.91, 1.0}, false};
    cpus["CPU-4"] = {"CPU-4",
                     {0.285, 0.333, 0.380, 0.428, 0.476, 0.523, 0.571, 0.619, 0.666, 0.714, 0.761,
                      0.809, 0.857, 0.904, 0.952, 1.0},
                     false};
    cpus["CPU-ideal"] = CpuLevels::continuous("CPU-ideal");
    for (const auto& [name, cpu] : cpus) {
        check_cpu_levels(cpu);
    }
    return cpus;
}

std::vector<std::string> builtin_cpu_names() {
    return {"CPU-1", "CPU-2", "CPU-3", "CPU-4", "CPU-ideal"};
}

std::optional<CpuLevels> find_builtin_cpu(const std::string& name) {
    auto cpus = builtin_cpus();
    auto it = cpus.find(name);
    if (it == cpus.end()) {
        return std::nullopt;
    }
    return it->second;
}

namespace {

void check_adaptation(const AdaptationParams& a, const std::string& path,
                      std::vector<std::string>& errors) {
    if (!(a.beta > 0.0) || !std::isfinite(a.beta)) {
        errors.push_back(path + ".beta: must be positive and finite");
    }
    if (!(a.e_min >= 0.0) || !std::isfinite(a.e_min)) {
        errors.push_back(path + ".e_min: must be non-negative");
    }
    if (!(a.e_min < a.e_max) || !std::isfinite(a.e_max)) {
        errors.push_back(path + ".e_max: must exceed e_min");
    }
}

void check_polynomial(const std::vector<double>& coeffs, const std::string& path,
                      std::vector<std::string>& errors) {
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (!std::isfinite(coeffs[j])) {
            errors.push_back(fmt::format("{}[{}]: not finite", path, j));
        }
    }
}

}  // namespace

std::vector<std::string> validate(const Scenario& s) {
    std::vector<std::string> errors;

    check_adaptation(s.adaptation, "adaptation", errors);

    double workload = 0.0;
    const double jitter_high = s.c_jitter ? s.c_jitter->high : 1.0;
    for (std::size_t i = 0; i < s.loops.size(); ++i) {
        const auto& l = s.loops[i];
        const std::string path = fmt::format("loops[{}]", i);

        check_polynomial(l.plant.num, path + ".plant.num", errors);
        check_polynomial(l.plant.den, path + ".plant.den", errors);
        std::size_t num_degree = l.plant.num.size();
        while (num_degree > 0 && l.plant.num[num_degree - 1] == 0.0) {
            --num_degree;
        }
        if (l.plant.den.size() < 2 || l.plant.den.back() == 0.0) {
            errors.push_back(path + ".plant.den: needs degree >= 1 and a non-zero leading coefficient");
        } else if (num_degree >= l.plant.den.size()) {
            errors.push_back(path + ".plant: transfer function must be strictly proper");
        }

        if (!std::isfinite(l.gains.kp) || !std::isfinite(l.gains.ki) ||
            !std::isfinite(l.gains.kd)) {
            errors.push_back(path + ".pid: gains must be finite");
        }

        if (l.c_nom_us <= 0) {
            errors.push_back(path + ".c_nom_ms: must be positive");
        }
        if (l.h0_us < l.c_nom_us) {
            errors.push_back(path + ".h0_ms: must be >= c_nom_ms");
        }
        if (l.h_max_us < l.h0_us) {
            errors.push_back(path + ".h_max_ms: must be >= h0_ms");
        }
        if (l.adaptation) {
            check_adaptation(*l.adaptation, path + ".adaptation", errors);
        }
        if (l.h0_us > 0) {
            workload += jitter_high * static_cast<double>(l.c_nom_us) / static_cast<double>(l.h0_us);
        }
    }
    if (workload > 1.0 + 1e-12) {
        errors.push_back(fmt::format(
            "loops: infeasible, sum of c_nom/h0 is {:.6g} > 1 (EDF cannot schedule at full speed)",
            workload));
    }

    const auto& cpu = s.cpu;
    if (!cpu.ideal) {
        if (cpu.levels.empty()) {
            errors.push_back("cpu.levels: empty");
        } else {
            if (!(cpu.levels.front() > 0.0)) {
                errors.push_back("cpu.levels: levels must be positive");
            }
            for (std::size_t m = 1; m < cpu.levels.size(); ++m) {
                if (!(cpu.levels[m - 1] < cpu.levels[m])) {
                    errors.push_back("cpu.levels: levels not ascending");
                    break;
                }
            }
            if (cpu.levels.back() != 1.0) {
                errors.push_back("cpu.levels: highest level must be 1.0");
            }
        }
    }

    if (s.duration_us < 0) {
        errors.push_back("duration_s: must be non-negative");
    }
    if (s.perturbation_interval_us <= 0) {
        errors.push_back("perturbation_interval_s: must be positive");
    }
    if (s.micro_step_us <= 0 || s.micro_step_us > 1000) {
        errors.push_back("micro_step_us: must be in [1, 1000]");
    }
    if (s.trace_cadence_us <= 0) {
        errors.push_back("trace_cadence_ms: must be positive");
    }
    if (s.switch_overhead_us < 0) {
        errors.push_back("switch_overhead_us: must be non-negative");
    }
    if (s.c_jitter) {
        if (!(s.c_jitter->low > 0.0) || !(s.c_jitter->low <= s.c_jitter->high) ||
            !std::isfinite(s.c_jitter->high)) {
            errors.push_back("c_jitter: need 0 < low <= high");
        }
    }
    return errors;
}

void require_valid(const Scenario& s) {
    const auto errors = validate(s);
    if (errors.empty()) {
        return;
    }
    std::string msg = "invalid scenario:";
    for (const auto& e : errors) {
        msg += "\n  " + e;
    }
    throw ConfigError(msg);
}

// ---------------------------------------------------------------------------
// YAML

namespace {

std::string where(const YAML::Node& node) {
    const auto mark = node.Mark();
    if (mark.is_null()) {
        return {};
    }
    return fmt::format("line {}, column {}: ", mark.line + 1, mark.column + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) {
    throw ConfigError(where(node) + path + ": " + msg);
}

void reject_unknown(const YAML::Node& map, const std::string& path,
                    const std::set<std::string>& known) {
    if (!map.IsMap()) {
        fail(map, path, "expected a mapping");
    }
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!known.contains(key)) {
            fail(kv.first, path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) {
        fail(node, path, "expected a scalar");
    }
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, path, "cannot convert '" + node.Scalar() + "'");
    }
}

std::vector<double> number_list(const YAML::Node& node, const std::string& path) {
    if (!node.IsSequence()) {
        fail(node, path, "expected a list of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(scalar<double>(node[i], fmt::format("{}[{}]", path, i)));
    }
    return out;
}

/// `value * scale` must land on a whole microsecond.
std::int64_t ticks(const YAML::Node& node, const std::string& path, double scale) {
    const double v = scalar<double>(node, path) * scale;
    if (!std::isfinite(v)) {
        fail(node, path, "not finite");
    }
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-6) {
        fail(node, path, "must be a whole number of microseconds");
    }
    return static_cast<std::int64_t>(rounded);
}

AdaptationParams parse_adaptation(const YAML::Node& node, const std::string& path,
                                  AdaptationParams base) {
    reject_unknown(node, path, {"beta", "e_min", "e_max"});
    if (node["beta"]) base.beta = scalar<double>(node["beta"], path + ".beta");
    if (node["e_min"]) base.e_min = scalar<double>(node["e_min"], path + ".e_min");
    if (node["e_max"]) base.e_max = scalar<double>(node["e_max"], path + ".e_max");
    return base;
}

CpuLevels parse_cpu_node(const YAML::Node& node, const std::string& path) {
    if (node.IsScalar()) {
        const auto name = node.as<std::string>();
        if (auto cpu = find_builtin_cpu(name)) {
            return *cpu;
        }
        fail(node, path, "unknown CPU '" + name + "'");
    }
    reject_unknown(node, path, {"name", "levels", "ideal"});
    CpuLevels cpu;
    cpu.name = node["name"] ? scalar<std::string>(node["name"], path + ".name") : "custom";
    cpu.ideal = node["ideal"] ? scalar<bool>(node["ideal"], path + ".ideal") : false;
    if (node["levels"]) {
        cpu.levels = number_list(node["levels"], path + ".levels");
    } else if (cpu.ideal) {
        cpu.levels = {1.0};
    } else {
        fail(node, path, "missing 'levels'");
    }
    return cpu;
}

LoopConfig parse_loop(const YAML::Node& node, const std::string& path) {
    reject_unknown(node, path, {"plant", "pid", "c_nom_ms", "h0_ms", "h_max_ms", "adaptation"});
    LoopConfig loop;
    for (const char* key : {"plant", "pid", "c_nom_ms", "h0_ms", "h_max_ms"}) {
        if (!node[key]) {
            fail(node, path, std::string("missing '") + key + "'");
        }
    }
    const auto plant = node["plant"];
    reject_unknown(plant, path + ".plant", {"num", "den"});
    if (!plant["num"] || !plant["den"]) {
        fail(plant, path + ".plant", "needs 'num' and 'den'");
    }
    loop.plant.num = number_list(plant["num"], path + ".plant.num");
    loop.plant.den = number_list(plant["den"], path + ".plant.den");

    const auto pid = node["pid"];
    reject_unknown(pid, path + ".pid", {"kp", "ki", "kd"});
    if (pid["kp"]) loop.gains.kp = scalar<double>(pid["kp"], path + ".pid.kp");
    if (pid["ki"]) loop.gains.ki = scalar<double>(pid["ki"], path + ".pid.ki");
    if (pid["kd"]) loop.gains.kd = scalar<double>(pid["kd"], path + ".pid.kd");

    loop.c_nom_us = ticks(node["c_nom_ms"], path + ".c_nom_ms", 1e3);
    loop.h0_us = ticks(node["h0_ms"], path + ".h0_ms", 1e3);
    loop.h_max_us = ticks(node["h_max_ms"], path + ".h_max_ms", 1e3);
    if (node["adaptation"]) {
        loop.adaptation = parse_adaptation(node["adaptation"], path + ".adaptation", {});
    }
    return loop;
}

YAML::Node load_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("line {}, column {}: {}", e.mark.line + 1,
                                      e.mark.column + 1, e.msg));
    }
}

std::string num(double v) { return fmt::format("{}", v); }

std::string num_list(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ", " : "") + num(values[i]);
    }
    return out + "]";
}

std::string ms(std::int64_t us) { return num(static_cast<double>(us) / 1e3); }
std::string seconds(std::int64_t us) { return num(static_cast<double>(us) / 1e6); }

std::string cpu_yaml(const CpuLevels& cpu, const std::string& indent) {
    std::string out;
    out += indent + "name: " + cpu.name + "\n";
    out += indent + "ideal: " + (cpu.ideal ? "true" : "false") + "\n";
    out += indent + "levels: " + num_list(cpu.levels) + "\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string to_string(SamplingPoint p) {
    return p == SamplingPoint::Start ? "start" : "release";
}

std::optional<SamplingPoint> parse_sampling_point(const std::string& text) {
    if (text == "release") return SamplingPoint::Release;
    if (text == "start") return SamplingPoint::Start;
    return std::nullopt;
}

Scenario parse_scenario(const std::string& text) {
    const YAML::Node root = load_yaml(text);
    reject_unknown(root, "",
                   {"name", "mode", "duration_s", "perturbation_interval_s", "micro_step_us",
                    "trace_cadence_ms", "seed", "switch_overhead_us", "sampling", "c_jitter",
                    "adaptation", "cpu", "loops"});
    Scenario s;
    s.loops.clear();
    if (root["name"]) s.name = scalar<std::string>(root["name"], "name");
    if (root["mode"]) {
        const auto text_mode = scalar<std::string>(root["mode"], "mode");
        auto mode = parse_policy_mode(text_mode);
        if (!mode) fail(root["mode"], "mode", "expected qapm, osdvs or dvs-only");
        s.mode = *mode;
    }
    if (root["duration_s"]) s.duration_us = ticks(root["duration_s"], "duration_s", 1e6);
    if (root["perturbation_interval_s"]) {
        s.perturbation_interval_us =
            ticks(root["perturbation_interval_s"], "perturbation_interval_s", 1e6);
    }
    if (root["micro_step_us"]) s.micro_step_us = ticks(root["micro_step_us"], "micro_step_us", 1.0);
    if (root["trace_cadence_ms"]) {
        s.trace_cadence_us = ticks(root["trace_cadence_ms"], "trace_cadence_ms", 1e3);
    }
    if (root["seed"]) s.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (root["switch_overhead_us"]) {
        s.switch_overhead_us = ticks(root["switch_overhead_us"], "switch_overhead_us", 1.0);
    }
    if (root["sampling"]) {
        auto point = parse_sampling_point(scalar<std::string>(root["sampling"], "sampling"));
        if (!point) fail(root["sampling"], "sampling", "expected release or start");
        s.sampling = *point;
    }
    if (root["c_jitter"]) {
        const auto range = number_list(root["c_jitter"], "c_jitter");
        if (range.size() != 2) fail(root["c_jitter"], "c_jitter", "expected [low, high]");
        s.c_jitter = JitterRange{range[0], range[1]};
    }
    if (root["adaptation"]) {
        s.adaptation = parse_adaptation(root["adaptation"], "adaptation", s.adaptation);
    }
    if (root["cpu"]) s.cpu = parse_cpu_node(root["cpu"], "cpu");
    if (root["loops"]) {
        const auto loops = root["loops"];
        if (!loops.IsSequence()) fail(loops, "loops", "expected a list");
        for (std::size_t i = 0; i < loops.size(); ++i) {
            s.loops.push_back(parse_loop(loops[i], fmt::format("loops[{}]", i)));
        }
    }
    return s;
}

std::string dump_scenario(const Scenario& s) {
    std::string out;
    out += "name: " + s.name + "\n";
    out += "mode: " + to_string(s.mode) + "\n";
    out += "duration_s: " + seconds(s.duration_us) + "\n";
    out += "perturbation_interval_s: " + seconds(s.perturbation_interval_us) + "\n";
    out += "micro_step_us: " + std::to_string(s.micro_step_us) + "\n";
    out += "trace_cadence_ms: " + ms(s.trace_cadence_us) + "\n";
    out += "seed: " + std::to_string(s.seed) + "\n";
    out += "switch_overhead_us: " + std::to_string(s.switch_overhead_us) + "\n";
    out += "sampling: " + to_string(s.sampling) + "\n";
    if (s.c_jitter) {
        out += "c_jitter: " + num_list({s.c_jitter->low, s.c_jitter->high}) + "\n";
    }
    out += "adaptation:\n";
    out += "  beta: " + num(s.adaptation.beta) + "\n";
    out += "  e_min: " + num(s.adaptation.e_min) + "\n";
    out += "  e_max: " + num(s.adaptation.e_max) + "\n";
    if (auto builtin = find_builtin_cpu(s.cpu.name); builtin && *builtin == s.cpu) {
        out += "cpu: " + s.cpu.name + "\n";
    } else {
        out += "cpu:\n" + cpu_yaml(s.cpu, "  ");
    }
    out += s.loops.empty() ? "loops: []\n" : "loops:\n";
    for (const auto& l : s.loops) {
        out += "  - plant:\n";
        out += "      num: " + num_list(l.plant.num) + "\n";
        out += "      den: " + num_list(l.plant.den) + "\n";
        out += fmt::format("    pid: {{kp: {}, ki: {}, kd: {}}}\n", num(l.gains.kp),
                           num(l.gains.ki), num(l.gains.kd));
        out += "    c_nom_ms: " + ms(l.c_nom_us) + "\n";
        out += "    h0_ms: " + ms(l.h0_us) + "\n";
        out += "    h_max_ms: " + ms(l.h_max_us) + "\n";
        if (l.adaptation) {
            out += fmt::format("    adaptation: {{beta: {}, e_min: {}, e_max: {}}}\n",
                               num(l.adaptation->beta), num(l.adaptation->e_min),
                               num(l.adaptation->e_max));
        }
    }
    return out;
}

Scenario load_scenario(const std::string& path) {
    return parse_scenario(read_file(path));
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << dump_scenario(s);
}

CpuLevels parse_cpu_levels(const std::string& text) {
    CpuLevels cpu = parse_cpu_node(load_yaml(text), "cpu");
    check_cpu_levels(cpu);
    return cpu;
}

CpuLevels load_cpu_levels(const std::string& path) {
    return parse_cpu_levels(read_file(path));
}

}  // namespace papm
