#pragma once

namespace papm {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;

    bool operator==(const PidGains&) const = default;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;
};

/// Positional PID with a sampling period that may change every sample.
///
/// Integral: forward Euler, I += ki*h*e, applied before the output.
/// Derivative: unfiltered backward difference on the error; zero on the
/// first sample after a reset. No saturation, no anti-windup.
class PidController {
public:
    PidController() = default;
    explicit PidController(PidGains gains) : gains_(gains) {}

    /// `e` is the signed error r - y, `h` the current sampling period in seconds.
    double compute(double e, double h);
    void reset() { state_ = PidState{}; }

    const PidGains& gains() const { return gains_; }
    const PidState& state() const { return state_; }

private:
    PidGains gains_;
    PidState state_;
};

}  // namespace papm
