#pragma once

// Levitation gap control, rest-to-rest motion planning and linear synchronous
// motor traction.

#include "emfield.hpp"

#include <vector>

namespace maglev::control {

struct PIDGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double output_min = -1.0;
    double output_max = 1.0;
    double integral_limit = 0.0;  ///< anti-windup bound on the integral term
};

struct PIDState {
    double integral = 0.0;
    double previous_error = 0.0;
    bool initialized = false;
};

struct PIDResult {
    double output = 0.0;
    PIDState state;
};

void validate(const PIDGains& gains);

/// Rectangle-rule PID on error = setpoint - measured. The integral is clamped
/// to +/-integral_limit before use and the derivative is zero on the first call.
PIDResult pid_step(const PIDGains& gains, const PIDState& state, double error, double dt);

struct Phase {
    double duration = 0.0;      ///< [s]
    double acceleration = 0.0;  ///< [m/s^2]
};

/// Piecewise-constant-acceleration plan ending at rest. Plans made by
/// plan_trapezoid also start at rest; replans may start at v_start > 0.
struct MotionProfile {
    std::vector<Phase> phases;
    double total_time = 0.0;
    double total_distance = 0.0;
    double v_limit = 0.0;
    double a_limit = 0.0;
    double v_start = 0.0;
};

struct ProfileSample {
    double position = 0.0;
    double velocity = 0.0;
    double acceleration = 0.0;
};

/// Rest-to-rest plan covering `distance`: trapezoidal when the cruise speed is
/// reachable (distance >= v_limit^2 / a_limit), triangular otherwise.
MotionProfile plan_trapezoid(double distance, double v_limit, double a_limit);

/// Plan from an initial forward speed to rest at `distance`. When the
/// remaining distance is shorter than the braking distance at a_limit (only
/// possible through rounding), the single braking phase uses the exact
/// deceleration needed.
MotionProfile plan_from_velocity(double v_start, double distance, double v_limit, double a_limit);

ProfileSample profile_sample(const MotionProfile& profile, double t);

/// d/q axis quantities of the long-stator motor.
struct LSMState {
    double psi_d = 0.0;  ///< [Wb]
    double psi_q = 0.0;  ///< [Wb]
    double i_d = 0.0;    ///< [A]
    double i_q = 0.0;    ///< [A]
    double tau = 0.0;    ///< stator pole pitch [m]
};

/// F = 3*pi/(2*tau) * (psi_d*i_q - psi_q*i_d).
double lsm_traction(const LSMState& s);

/// q-axis current that produces `force` with i_d held at zero.
double iq_for_force(double psi_d, double tau, double force);

/// Small-signal gap dynamics about the equilibrium of a parallel-plate
/// electromagnet carrying `mass`: m*dg'' = k_gap*dg - k_current*dI.
struct LinearGapPlant {
    double mass = 0.0;
    double setpoint = 0.0;       ///< equilibrium gap [m]
    double bias_current = 0.0;   ///< equilibrium current [A]
    double k_gap = 0.0;          ///< negative stiffness [N/m]
    double k_current = 0.0;      ///< force per amp [N/A]
};

LinearGapPlant linearize_gap(const emfield::GapGeometry& at_setpoint, double mass);

/// PID gap loop around a LinearGapPlant, integrated with semi-implicit Euler.
/// The controller output is subtracted from the bias current: a gap that is
/// too wide gives negative error and so more current.
class GapLoop {
public:
    GapLoop(const LinearGapPlant& plant, const PIDGains& gains, double initial_gap);

    struct Sample {
        double gap = 0.0;
        double current = 0.0;
    };

    Sample step(double dt);
    Sample current() const { return {plant_.setpoint + deviation_, current_}; }
    const LinearGapPlant& plant() const { return plant_; }

private:
    LinearGapPlant plant_;
    PIDGains gains_;
    PIDState pid_;
    double deviation_ = 0.0;
    double rate_ = 0.0;
    double current_ = 0.0;
};

}  // namespace maglev::control
