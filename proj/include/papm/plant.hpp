#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace papm {

/// Rational transfer function num(s)/den(s); coefficients in ascending powers of s.
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;

    int order() const { return static_cast<int>(den.size()) - 1; }
    double dc_gain() const;

    bool operator==(const TransferFunction&) const = default;
};

/// Strictly proper LTI plant x' = A x + B u, y = C x, with the input held
/// between actuations and integrated by fixed-step classical RK4.
class StateSpacePlant {
public:
    StateSpacePlant() = default;
    StateSpacePlant(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c,
                    double micro_step_s = 1e-4, std::string label = {});

    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::VectorXd& b() const { return b_; }
    const Eigen::RowVectorXd& c() const { return c_; }
    const Eigen::VectorXd& state() const { return x_; }
    double input() const { return u_; }
    double micro_step() const { return micro_step_; }
    const std::string& label() const { return label_; }

    void set_state(const Eigen::VectorXd& x) { x_ = x; }
    void set_micro_step(double dt_s);

    /// y = C x at the current instant.
    double sample() const { return c_.dot(x_); }
    /// Replaces the held input; takes effect for all later integration.
    void actuate(double u) { u_ = u; }
    void reset();

    /// Advances by `dt_s` seconds in micro-steps; the last step takes the remainder.
    void integrate(double dt_s);
    /// One RK4 step of exactly `h` seconds.
    void step(double h);

private:
    void check_finite() const;

    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::RowVectorXd c_;
    Eigen::VectorXd x_;
    double u_ = 0.0;
    double micro_step_ = 1e-4;
    std::string label_;

    Eigen::VectorXd k1_, k2_, k3_, k4_, w_;
};

/// Controllable canonical realization, denominator normalized to monic.
/// Throws ConfigError for improper or degenerate transfer functions.
StateSpacePlant tf_to_state_space(const TransferFunction& tf, double micro_step_s = 1e-4,
                                  std::string label = {});

/// Square wave shared by every loop: 1 on [0, T), 0 on [T, 2T), and so on.
struct ReferenceSignal {
    std::int64_t interval_us = 1'000'000;
    double amplitude = 1.0;

    double at(std::int64_t t_us) const;
    /// First step instant strictly after `t_us`.
    std::int64_t next_step_after(std::int64_t t_us) const;
};

}  // namespace papm
