#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace papm {

using SimTime = std::int64_t;  ///< microseconds since t = 0

constexpr double kTickSeconds = 1e-6;

/// Per-loop integral of |r - y|, fed one trapezoid slice at a time.
class IaeAccumulator {
public:
    IaeAccumulator() = default;
    explicit IaeAccumulator(std::size_t loops) : per_loop_(loops, 0.0) {}

    /// Trapezoid slice over `dt_s` seconds between errors `e0` and `e1`.
    void add(std::size_t loop, double e0, double e1, double dt_s);

    double loop(std::size_t i) const { return per_loop_.at(i); }
    const std::vector<double>& per_loop() const { return per_loop_; }
    double total() const;

private:
    std::vector<double> per_loop_;
};

/// Integral of E(alpha) = alpha^2 over time. The speed is piecewise constant,
/// so the integral is a finite sum over speed-change points.
class EnergyAccumulator {
public:
    void set_speed(SimTime t, double alpha);
    /// Accounts [from, to) at the current speed. `from` must continue the
    /// previous interval; throws InternalError otherwise.
    void advance(SimTime from, SimTime to);

    double integral() const { return integral_; }
    SimTime elapsed() const { return elapsed_; }
    double speed() const { return alpha_; }
    /// Mean power; empty for a zero-length run.
    std::optional<double> average() const;
    const std::vector<std::pair<SimTime, double>>& changes() const { return changes_; }

private:
    double alpha_ = 1.0;
    double integral_ = 0.0;
    SimTime elapsed_ = 0;
    SimTime cursor_ = 0;
    std::vector<std::pair<SimTime, double>> changes_;
};

/// Recomputes the energy integral from a speed-change list over [0, end).
double energy_from_changes(const std::vector<std::pair<SimTime, double>>& changes, SimTime end);

/// One row of the per-loop trace.
struct TraceRow {
    SimTime time = 0;
    int loop = 0;
    double r = 0.0;
    double y = 0.0;
    double e = 0.0;
    double u = 0.0;
    double h_eff_ms = 0.0;
    double alpha = 0.0;
    double energy = 0.0;
};

}  // namespace papm
