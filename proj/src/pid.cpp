#include "papm/pid.hpp"

#include <cmath>

#include "papm/errors.hpp"

namespace papm {

double PidController::compute(double e, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InputError("PID sampling period must be positive");
    }
    if (!std::isfinite(e)) {
        throw InputError("PID error must be finite");
    }
    state_.integral += gains_.ki * h * e;
    const double derivative = state_.has_prev ? gains_.kd * (e - state_.prev_error) / h : 0.0;
    state_.prev_error = e;
    state_.has_prev = true;
    return gains_.kp * e + state_.integral + derivative;
}

}  // namespace papm
