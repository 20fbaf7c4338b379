#include "papm/plant.hpp"

#include <cmath>

#include "papm/errors.hpp"

namespace papm {

double TransferFunction::dc_gain() const {
    if (den.empty() || den.front() == 0.0) {
        throw ConfigError("transfer function has a pole at s = 0");
    }
    return (num.empty() ? 0.0 : num.front()) / den.front();
}

StateSpacePlant::StateSpacePlant(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c,
                                 double micro_step_s, std::string label)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), label_(std::move(label)) {
    const auto n = a_.rows();
    if (a_.cols() != n || b_.size() != n || c_.size() != n || n == 0) {
        throw ConfigError("state-space dimensions are inconsistent");
    }
    set_micro_step(micro_step_s);
    x_ = Eigen::VectorXd::Zero(n);
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    w_.resize(n);
}

void StateSpacePlant::set_micro_step(double dt_s) {
    if (!(dt_s > 0.0) || dt_s > 1e-3) {
        throw ConfigError("micro step must be in (0, 1 ms]");
    }
    micro_step_ = dt_s;
}

void StateSpacePlant::reset() {
    x_.setZero();
    u_ = 0.0;
}

void StateSpacePlant::step(double h) {
    k1_.noalias() = a_ * x_;
    k1_ += b_ * u_;

    w_ = x_ + (h / 2) * k1_;
    k2_.noalias() = a_ * w_;
    k2_ += b_ * u_;

    w_ = x_ + (h / 2) * k2_;
    k3_.noalias() = a_ * w_;
    k3_ += b_ * u_;

    w_ = x_ + h * k3_;
    k4_.noalias() = a_ * w_;
    k4_ += b_ * u_;

    x_ += (h / 6) * (k1_ + 2 * k2_ + 2 * k3_ + k4_);
}

void StateSpacePlant::integrate(double dt_s) {
    if (dt_s < 0.0) {
        throw InternalError("negative integration interval");
    }
    double left = dt_s;
    // Treat a sliver below 1e-12 of a micro-step as float dust, not a step.
    while (left > micro_step_ * 1e-12) {
        const double h = left < micro_step_ ? left : micro_step_;
        step(h);
        left -= h;
    }
    check_finite();
}

void StateSpacePlant::check_finite() const {
    if (!x_.allFinite()) {
        throw NumericError("plant '" + label_ + "' state diverged");
    }
}

StateSpacePlant tf_to_state_space(const TransferFunction& tf, double micro_step_s,
                                  std::string label) {
    auto den = tf.den;
    auto num = tf.num;
    while (!num.empty() && num.back() == 0.0) {
        num.pop_back();
    }
    if (den.size() < 2 || den.back() == 0.0) {
        throw ConfigError("denominator must have degree >= 1 and a non-zero leading coefficient");
    }
    if (num.size() >= den.size()) {
        throw ConfigError("transfer function must be strictly proper");
    }
    for (double v : den) {
        if (!std::isfinite(v)) throw ConfigError("non-finite denominator coefficient");
    }
    for (double v : num) {
        if (!std::isfinite(v)) throw ConfigError("non-finite numerator coefficient");
    }

    const double lead = den.back();
    const int n = static_cast<int>(den.size()) - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = 1.0;
    }
    for (int j = 0; j < n; ++j) {
        a(n - 1, j) = -den[j] / lead;
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
    for (std::size_t j = 0; j < num.size(); ++j) {
        c(static_cast<int>(j)) = num[j] / lead;
    }
    return StateSpacePlant(std::move(a), std::move(b), std::move(c), micro_step_s,
                           std::move(label));
}

double ReferenceSignal::at(std::int64_t t_us) const {
    if (t_us < 0) {
        return 0.0;
    }
    return (t_us / interval_us) % 2 == 0 ? amplitude : 0.0;
}

std::int64_t ReferenceSignal::next_step_after(std::int64_t t_us) const {
    if (t_us < 0) {
        return 0;
    }
    return (t_us / interval_us + 1) * interval_us;
}

}  // namespace papm
