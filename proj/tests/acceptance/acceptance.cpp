// Reference-benchmark acceptance gate. One PASS/FAIL line per criterion;
// exit status is non-zero when any criterion fails.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "papm/policy.hpp"
#include "papm/runner.hpp"
#include "papm/scenario.hpp"

namespace fs = std::filesystem;
using namespace papm;

namespace {

int failures = 0;

void verdict(bool ok, const std::string& name, const std::string& detail) {
    fmt::print("{} {:<24} {}\n", ok ? "PASS" : "FAIL", name, detail);
    if (!ok) ++failures;
}

const std::vector<std::string> kColumns{"osDVS", "CPU-1", "CPU-2", "CPU-3", "CPU-4", "CPU-ideal"};
const std::map<std::string, double> kEnergy{{"osDVS", 0.918}, {"CPU-1", 0.796}, {"CPU-2", 0.694},
                                            {"CPU-3", 0.636}, {"CPU-4", 0.614}, {"CPU-ideal", 0.504}};
const std::map<std::string, double> kCost{{"osDVS", 7.588}, {"CPU-1", 7.895}, {"CPU-2", 8.034},
                                          {"CPU-3", 8.006}, {"CPU-4", 8.020}, {"CPU-ideal", 8.164}};
constexpr double kLoop1Iae = 1.205;

std::vector<CpuLevels> all_cpus() {
    std::vector<CpuLevels> out;
    for (const auto& n : builtin_cpu_names()) out.push_back(*find_builtin_cpu(n));
    return out;
}

std::map<std::string, RunReport> by_label(const SweepTable& t) {
    std::map<std::string, RunReport> out;
    for (const auto& c : t.columns) out[c.label] = c.report;
    return out;
}

void check_osdvs_energy(const std::map<std::string, RunReport>& r) {
    const auto& os = r.at("osDVS");
    const bool constant = os.speed_changes.size() == 1;
    const double e = *os.e_avg;
    verdict(constant && std::abs(e - 0.918) <= 0.001, "osdvs-energy",
            fmt::format("E_AVG={:.6f} target 0.918+-0.001, speed changes={}", e,
                        os.speed_changes.size()));
}

void check_energy_table(const std::map<std::string, RunReport>& r) {
    bool in_band = true;
    std::string detail;
    for (const auto& c : kColumns) {
        const double e = *r.at(c).e_avg;
        const bool ok = std::abs(e - kEnergy.at(c)) <= 0.08;
        in_band = in_band && ok;
        detail += fmt::format("{}={:.3f}({:.3f}){} ", c, e, kEnergy.at(c), ok ? "" : "!");
    }
    bool ordered = true;
    for (std::size_t i = 1; i < kColumns.size(); ++i) {
        ordered = ordered && *r.at(kColumns[i - 1]).e_avg > *r.at(kColumns[i]).e_avg;
    }
    verdict(in_band && ordered, "energy-table",
            detail + fmt::format("band+-0.08={} ordering={}", in_band ? "ok" : "no",
                                 ordered ? "ok" : "no"));
}

void check_cost_table(const std::map<std::string, RunReport>& r) {
    bool in_band = true;
    std::string detail;
    for (const auto& c : kColumns) {
        const double j = r.at(c).j_sum;
        const bool ok = std::abs(j - kCost.at(c)) <= 0.15 * kCost.at(c);
        in_band = in_band && ok;
        detail += fmt::format("{}={:.3f}({:.3f}){} ", c, j, kCost.at(c), ok ? "" : "!");
    }
    const double base = r.at("osDVS").j_sum;
    bool above = true;
    for (std::size_t i = 1; i < kColumns.size(); ++i) above = above && r.at(kColumns[i]).j_sum >= base;
    const double ideal_rise = r.at("CPU-ideal").j_sum / base - 1.0;
    verdict(in_band && above && ideal_rise <= 0.15, "cost-table",
            detail + fmt::format("adaptive>=osDVS={} ideal rise={:.1f}%", above ? "ok" : "no",
                                 100 * ideal_rise));
}

void check_loop1(const std::map<std::string, RunReport>& r, const char* name) {
    const double base = r.at("osDVS").loops[0].iae;
    const bool base_ok = std::abs(base - kLoop1Iae) <= 0.15 * kLoop1Iae;
    double worst = 0.0;
    std::string worst_cpu;
    for (const char* c : {"CPU-1", "CPU-2", "CPU-3", "CPU-4"}) {
        const double rise = r.at(c).loops[0].iae / base - 1.0;
        if (worst_cpu.empty() || rise > worst) {
            worst = rise;
            worst_cpu = c;
        }
    }
    verdict(base_ok && worst <= 0.10, name,
            fmt::format("osDVS IAE1={:.4f} target {}+-15%, worst multi-level rise {:+.1f}% ({}) "
                        "limit +10%",
                        base, kLoop1Iae, 100 * worst, worst_cpu));
}

void check_misses(const std::map<std::string, RunReport>& r) {
    std::size_t total = 0;
    std::string detail;
    for (const auto& c : kColumns) {
        total += r.at(c).misses;
        detail += fmt::format("{}={} ", c, r.at(c).misses);
    }
    verdict(total == 0, "deadline-misses", detail);
}

void check_policy_properties() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    int eta_bad = 0;
    for (int n = 0; n < 100000; ++n) {
        TaskSpec t{0, 1000, 5000 + 20000 * u01(rng), 0, {}};
        t.h_max = t.h0 * (1 + 6 * u01(rng));
        t.adaptation = {1 + 99 * u01(rng), 0.1 * u01(rng), 0};
        t.adaptation.e_max = t.adaptation.e_min + 1e-3 + 0.9 * u01(rng);
        const auto& a = t.adaptation;
        const double ratio = t.h_max / t.h0;
        const double e = 1.2 * u01(rng);
        const double v = period_scale_factor(e, t);
        double ref = 1.0;
        if (e <= a.e_min) {
            ref = ratio;
        } else if (e < a.e_max) {
            ref = (std::exp(-a.beta * e) - std::exp(-a.beta * a.e_max)) /
                      (std::exp(-a.beta * a.e_min) - std::exp(-a.beta * a.e_max)) * (ratio - 1) + 1;
        }
        bool ok = v >= 1.0 && v <= ratio && std::abs(v - ref) <= 1e-9 * ratio;
        ok = ok && period_scale_factor(e + 0.05 * u01(rng), t) <= v + 1e-12;
        for (double edge : {a.e_min, a.e_max}) {
            const double mid = period_scale_factor(edge, t);
            ok = ok && std::abs(period_scale_factor(edge + 1e-9, t) - mid) < 1e-5 * ratio &&
                 std::abs(period_scale_factor(std::max(0.0, edge - 1e-9), t) - mid) < 1e-5 * ratio;
        }
        eta_bad += ok ? 0 : 1;
    }

    int quant_bad = 0;
    for (int n = 0; n < 20000; ++n) {
        std::vector<double> lv{1.0};
        const int m = 1 + static_cast<int>(u01(rng) * 20);
        for (int i = 0; i < m; ++i) lv.push_back(0.01 + 0.98 * u01(rng));
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        const double a = n % 5 == 0 ? lv[static_cast<std::size_t>(u01(rng) * lv.size())]
                                    : 1e-6 + (1 - 1e-6) * u01(rng);
        double brute = lv.front();
        for (auto it = lv.rbegin(); it != lv.rend(); ++it) {
            if (*it >= a - 1e-12) brute = *it;
        }
        quant_bad += quantize_speed(a, {"r", lv, false}) == brute ? 0 : 1;
    }

    int reclaim_bad = 0;
    const auto cpus = all_cpus();
    for (int n = 0; n < 10000; ++n) {
        const int k = 1 + static_cast<int>(u01(rng) * 8);
        std::vector<double> c(k), h(k);
        for (int i = 0; i < k; ++i) {
            h[i] = 1000 + 50000 * u01(rng);
            c[i] = h[i] * u01(rng) / k;
        }
        const double ideal = ideal_speed(c, h);
        const double alpha = quantize_speed(ideal, cpus[n % cpus.size()]);
        const auto eff = reclaim_periods(h, ideal, alpha);
        double u = 0;
        for (int i = 0; i < k; ++i) u += (c[i] / alpha) / eff[i];
        reclaim_bad += std::abs(u - 1.0) <= 1e-9 ? 0 : 1;
    }
    verdict(eta_bad + quant_bad + reclaim_bad == 0, "policy-properties",
            fmt::format("scale-factor 100000 samples: {} bad; quantization 20000 sets: {} bad; "
                        "reclaim 10000 sets: {} bad",
                        eta_bad, quant_bad, reclaim_bad));
}

void check_rk4() {
    const TransferFunction tf{{1}, {20, 10, 1}};
    const double fine = oracle::max_step_error(tf, 1e-4, 1e-3, 3.0, oracle::step_loop2);
    // At 100 us the error is at round-off level, so the order is read off coarse steps.
    const double e20 = oracle::max_step_error(tf, 0.02, 0.02, 2.0, oracle::step_loop2);
    const double e10 = oracle::max_step_error(tf, 0.01, 0.02, 2.0, oracle::step_loop2);
    const double e5 = oracle::max_step_error(tf, 0.005, 0.02, 2.0, oracle::step_loop2);
    const double r1 = e20 / e10;
    const double r2 = e10 / e5;
    const auto near16 = [](double r) { return r >= 16 * 0.85 && r <= 16 * 1.15; };
    verdict(fine <= 1e-6 && near16(r1) && near16(r2), "rk4-oracle",
            fmt::format("max err @100us={:.2e} (<=1e-6); halving ratios {:.2f}, {:.2f} (16+-15%)",
                        fine, r1, r2));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_determinism(const fs::path& first) {
    const auto second = fs::temp_directory_path() / "papm_acceptance_b";
    fs::remove_all(second);
    sweep(builtin_table1(), all_cpus(), second);
    int differing = 0;
    int compared = 0;
    for (const auto& c : kColumns) {
        for (const char* f : {"trace.csv", "report.json"}) {
            ++compared;
            const auto a = slurp(first / c / f);
            differing += (a.empty() || a != slurp(second / c / f)) ? 1 : 0;
        }
    }
    verdict(differing == 0, "determinism",
            fmt::format("{} of {} output files byte-identical across two sweeps",
                        compared - differing, compared));
}

}  // namespace

int main() {
    const auto dir = fs::temp_directory_path() / "papm_acceptance_a";
    fs::remove_all(dir);
    const auto reports = by_label(sweep(builtin_table1(), all_cpus(), dir));

    check_osdvs_energy(reports);
    check_energy_table(reports);
    check_cost_table(reports);
    check_loop1(reports, "loop1-qoc");
    check_misses(reports);
    check_policy_properties();
    check_rk4();
    check_determinism(dir);

    // Not a criterion: same benchmark with the controller sampling at job start.
    auto start = builtin_table1();
    start.sampling = SamplingPoint::Start;
    const auto alt = by_label(sweep(start, all_cpus()));
    fmt::print("INFO {:<24} osDVS E_AVG={:.4f} J_SUM={:.3f} IAE1={:.4f}; ", "start-sampling",
               *alt.at("osDVS").e_avg, alt.at("osDVS").j_sum, alt.at("osDVS").loops[0].iae);
    for (const char* c : {"CPU-1", "CPU-2", "CPU-3", "CPU-4", "CPU-ideal"}) {
        fmt::print("{} E={:.3f} J={:.3f} IAE1 {:+.1f}%  ", c, *alt.at(c).e_avg, alt.at(c).j_sum,
                   100 * (alt.at(c).loops[0].iae / alt.at("osDVS").loops[0].iae - 1));
    }
    fmt::print("\n");

    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
