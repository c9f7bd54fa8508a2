#include "dynamics.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace maglev::dynamics {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool finite(const ForceBalance& fb) {
    return std::isfinite(fb.drive) && std::isfinite(fb.friction) && std::isfinite(fb.drag);
}

// Applies acceleration over dt. Resistance may bring the mover to rest but
// not through zero: a sign flip that the drive alone would not cause is
// clamped to a stop.
MoverState advance(const MoverState& s, const ForceBalance& fb, double a, double dt) {
    MoverState next = s;
    double v = s.velocity + a * dt;
    const int before = sign_of(s.velocity);
    if (before != 0 && sign_of(v) == -before) {
        const double driven = s.velocity + fb.drive / s.mass * dt;
        if (sign_of(driven) != -before) {
            v = 0.0;
        }
    }
    next.velocity = v;
    next.position = s.position + v * dt;
    return next;
}

}  // namespace

ForceBalance DragModel::at(double drive, double velocity) const {
    return {drive, friction, c_b * std::abs(velocity)};
}

double DragModel::drive_for(double mass, double acceleration, double velocity) const {
    const double resist = sign_of(velocity) * (friction + c_b * std::abs(velocity));
    return mass * acceleration + resist;
}

void validate(const ForceBalance& fb) {
    if (!finite(fb)) throw DomainError("force balance has a non-finite term");
    if (fb.friction < 0.0) throw DomainError("friction force must be >= 0");
    if (fb.drag < 0.0) throw DomainError("electromagnetic drag must be >= 0");
}

void validate(const MoverState& s) {
    if (!(std::isfinite(s.position) && std::isfinite(s.velocity) && std::isfinite(s.mass) &&
          std::isfinite(s.gap) && std::isfinite(s.lev_current) && std::isfinite(s.drive_iq))) {
        throw DomainError("mover state has a non-finite field");
    }
    if (s.mass <= 0.0) throw DomainError("mover mass must be > 0");
    if (s.gap <= 0.0) throw DomainError("mover air gap must be > 0");
}

double net_acceleration(const ForceBalance& fb, double mass, int velocity_sign, double static_threshold) {
    if (!(mass > 0.0)) throw DomainError("mass must be > 0");
    const double resist = fb.friction + fb.drag;
    if (velocity_sign != 0) {
        return (fb.drive - sign_of(velocity_sign) * resist) / mass;
    }
    if (std::abs(fb.drive) <= static_threshold) {
        return 0.0;
    }
    const double net = fb.drive - sign_of(fb.drive) * resist;
    if (sign_of(net) != sign_of(fb.drive)) {
        return 0.0;
    }
    return net / mass;
}

Kinematics closed_form(double v0, double acceleration, double t) {
    if (t < 0.0) throw DomainError("time must be >= 0");
    return {v0 + acceleration * t, v0 * t + 0.5 * acceleration * t * t};
}

MoverState step(const MoverState& state, const ForceSampler& force, double dt, long long tick,
                double static_threshold) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");
    const ForceBalance fb = force(state);
    if (!finite(fb)) {
        throw SimulationError(tick, "non-finite force sample");
    }
    const double a = net_acceleration(fb, state.mass, sign_of(state.velocity), static_threshold);
    return advance(state, fb, a, dt);
}

long long full_steps(double t_end, double dt) {
    const double ratio = t_end / dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
        return static_cast<long long>(nearest);
    }
    return static_cast<long long>(std::floor(ratio));
}

Trajectory simulate(const MoverState& initial, const ForceSampler& force, double t_end, double dt,
                    double static_threshold) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
    validate(initial);

    const long long n = full_steps(t_end, dt);
    const double tail = t_end - static_cast<double>(n) * dt;
    const bool has_tail = tail > 1e-9 * dt;

    Trajectory out;
    out.reserve(static_cast<std::size_t>(n) + 2);

    MoverState s = initial;
    auto sample = [&](double t, long long tick) {
        const ForceBalance fb = force(s);
        if (!finite(fb)) throw SimulationError(tick, "non-finite force sample");
        const double a = net_acceleration(fb, s.mass, sign_of(s.velocity), static_threshold);
        out.push_back({t, s.position, s.velocity, a});
        return std::pair{fb, a};
    };

    for (long long i = 0; i < n; ++i) {
        const auto [fb, a] = sample(static_cast<double>(i) * dt, i);
        s = advance(s, fb, a, dt);
        if (!std::isfinite(s.position) || !std::isfinite(s.velocity)) {
            throw SimulationError(i, "state became non-finite");
        }
    }
    if (has_tail) {
        const auto [fb, a] = sample(static_cast<double>(n) * dt, n);
        s = advance(s, fb, a, tail);
        sample(t_end, n + 1);
    } else {
        sample(t_end, n);
    }
    return out;
}

}  // namespace maglev::dynamics
