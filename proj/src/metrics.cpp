#include "papm/metrics.hpp"

#include <cmath>
#include <numeric>

#include "papm/errors.hpp"

namespace papm {

void IaeAccumulator::add(std::size_t loop, double e0, double e1, double dt_s) {
    per_loop_.at(loop) += 0.5 * (std::abs(e0) + std::abs(e1)) * dt_s;
}

double IaeAccumulator::total() const {
    return std::accumulate(per_loop_.begin(), per_loop_.end(), 0.0);
}

void EnergyAccumulator::set_speed(SimTime t, double alpha) {
    if (t < cursor_) {
        throw InternalError("speed change before the accounted horizon");
    }
    if (!changes_.empty() && changes_.back().first == t) {
        // Several decisions in one tick: only the last one is ever in force.
        changes_.back().second = alpha;
        if (changes_.size() >= 2 && changes_[changes_.size() - 2].second == alpha) {
            changes_.pop_back();
        }
    } else if (changes_.empty() || changes_.back().second != alpha) {
        changes_.emplace_back(t, alpha);
    }
    alpha_ = alpha;
}

void EnergyAccumulator::advance(SimTime from, SimTime to) {
    if (from != cursor_ || to < from) {
        throw InternalError("energy accounting out of order");
    }
    integral_ += alpha_ * alpha_ * static_cast<double>(to - from) * kTickSeconds;
    elapsed_ += to - from;
    cursor_ = to;
}

std::optional<double> EnergyAccumulator::average() const {
    if (elapsed_ == 0) {
        return std::nullopt;
    }
    return integral_ / (static_cast<double>(elapsed_) * kTickSeconds);
}

double energy_from_changes(const std::vector<std::pair<SimTime, double>>& changes, SimTime end) {
    double total = 0.0;
    for (std::size_t i = 0; i < changes.size(); ++i) {
        const SimTime from = changes[i].first;
        const SimTime to = i + 1 < changes.size() ? changes[i + 1].first : end;
        if (to > from) {
            total += changes[i].second * changes[i].second * static_cast<double>(to - from) *
                     kTickSeconds;
        }
    }
    return total;
}

}  // namespace papm
