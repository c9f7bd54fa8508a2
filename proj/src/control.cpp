#include "control.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maglev::control {

void validate(const PIDGains& g) {
    if (!(std::isfinite(g.kp) && std::isfinite(g.ki) && std::isfinite(g.kd))) {
        throw DomainError("PID gains must be finite");
    }
    if (g.kp < 0.0 || g.ki < 0.0 || g.kd < 0.0) throw DomainError("PID gains must be >= 0");
    if (!(g.output_min < g.output_max)) throw DomainError("PID output_min must be < output_max");
    if (!(g.integral_limit >= 0.0)) throw DomainError("PID integral_limit must be >= 0");
}

PIDResult pid_step(const PIDGains& gains, const PIDState& state, double error, double dt) {
    if (!(dt > 0.0)) throw DomainError("dt must be > 0");
    PIDState next = state;
    next.integral = std::clamp(state.integral + error * dt, -gains.integral_limit, gains.integral_limit);
    const double derivative = state.initialized ? (error - state.previous_error) / dt : 0.0;
    next.previous_error = error;
    next.initialized = true;
    const double raw = gains.kp * error + gains.ki * next.integral + gains.kd * derivative;
    return {std::clamp(raw, gains.output_min, gains.output_max), next};
}

namespace {

void check_limits(double v_limit, double a_limit) {
    if (!(v_limit > 0.0) || !std::isfinite(v_limit)) throw DomainError("v_limit must be > 0");
    if (!(a_limit > 0.0) || !std::isfinite(a_limit)) throw DomainError("a_limit must be > 0");
}

void push(MotionProfile& p, double duration, double acceleration) {
    if (duration > 0.0) {
        p.phases.push_back({duration, acceleration});
        p.total_time += duration;
    }
}

}  // namespace

MotionProfile plan_trapezoid(double distance, double v_limit, double a_limit) {
    return plan_from_velocity(0.0, distance, v_limit, a_limit);
}

MotionProfile plan_from_velocity(double v_start, double distance, double v_limit, double a_limit) {
    check_limits(v_limit, a_limit);
    if (!(distance >= 0.0) || !std::isfinite(distance)) throw DomainError("distance must be >= 0");
    if (!(v_start >= 0.0) || !std::isfinite(v_start)) throw DomainError("start speed must be >= 0");
    if (v_start > v_limit * (1.0 + 1e-12)) throw DomainError("start speed exceeds v_limit");

    MotionProfile p;
    p.total_distance = distance;
    p.v_limit = v_limit;
    p.a_limit = a_limit;
    p.v_start = v_start;

    if (v_start == 0.0 && distance == 0.0) {
        return p;
    }
    const double braking = v_start * v_start / (2.0 * a_limit);
    if (distance <= braking) {
        if (distance == 0.0) throw DomainError("cannot stop a moving mover in zero distance");
        push(p, 2.0 * distance / v_start, -v_start * v_start / (2.0 * distance));
        return p;
    }
    const double peak = std::sqrt(a_limit * distance + 0.5 * v_start * v_start);
    if (peak <= v_limit) {
        push(p, (peak - v_start) / a_limit, a_limit);
        push(p, peak / a_limit, -a_limit);
    } else {
        const double ramp_up = (v_limit * v_limit - v_start * v_start) / (2.0 * a_limit);
        const double ramp_down = v_limit * v_limit / (2.0 * a_limit);
        push(p, (v_limit - v_start) / a_limit, a_limit);
        push(p, (distance - ramp_up - ramp_down) / v_limit, 0.0);
        push(p, v_limit / a_limit, -a_limit);
    }
    return p;
}

ProfileSample profile_sample(const MotionProfile& p, double t) {
    if (!(t >= 0.0)) throw DomainError("sample time must be >= 0");
    if (t >= p.total_time) {
        return {p.total_distance, 0.0, 0.0};
    }
    double x = 0.0;
    double v = p.v_start;
    double elapsed = 0.0;
    for (const Phase& ph : p.phases) {
        if (t < elapsed + ph.duration) {
            const double tau = t - elapsed;
            return {x + v * tau + 0.5 * ph.acceleration * tau * tau, v + ph.acceleration * tau, ph.acceleration};
        }
        x += v * ph.duration + 0.5 * ph.acceleration * ph.duration * ph.duration;
        v += ph.acceleration * ph.duration;
        elapsed += ph.duration;
    }
    return {p.total_distance, 0.0, 0.0};
}

double lsm_traction(const LSMState& s) {
    if (!(s.tau > 0.0)) throw DomainError("pole pitch tau must be > 0");
    return 3.0 * std::numbers::pi / (2.0 * s.tau) * (s.psi_d * s.i_q - s.psi_q * s.i_d);
}

double iq_for_force(double psi_d, double tau, double force) {
    if (!(tau > 0.0)) throw DomainError("pole pitch tau must be > 0");
    if (psi_d == 0.0) throw DomainError("psi_d is zero: no q-axis current can produce the demanded force");
    return force * 2.0 * tau / (3.0 * std::numbers::pi * psi_d);
}

LinearGapPlant linearize_gap(const emfield::GapGeometry& at_setpoint, double mass) {
    if (!(mass > 0.0)) throw DomainError("levitated mass must be > 0");
    LinearGapPlant plant;
    plant.mass = mass;
    plant.setpoint = at_setpoint.gap;
    plant.bias_current = emfield::levitation_current_for_load(at_setpoint, mass);
    const double weight = mass * emfield::constants::g_grav;
    plant.k_gap = 2.0 * weight / at_setpoint.gap;
    plant.k_current = 2.0 * weight / plant.bias_current;
    return plant;
}

GapLoop::GapLoop(const LinearGapPlant& plant, const PIDGains& gains, double initial_gap)
    : plant_(plant), gains_(gains), deviation_(initial_gap - plant.setpoint), current_(plant.bias_current) {
    validate(gains_);
}

GapLoop::Sample GapLoop::step(double dt) {
    const double error = -deviation_;
    const PIDResult r = pid_step(gains_, pid_, error, dt);
    pid_ = r.state;
    current_ = plant_.bias_current - r.output;
    const double accel = (plant_.k_gap * deviation_ - plant_.k_current * (current_ - plant_.bias_current)) / plant_.mass;
    rate_ += accel * dt;
    deviation_ += rate_ * dt;
    return current();
}

}  // namespace maglev::control
