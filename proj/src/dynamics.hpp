#pragma once

// Transport-axis dynamics of a single mover: Newtonian force balance,
// closed-form constant-acceleration kinematics and a fixed-step
// semi-implicit Euler integrator.

#include <functional>
#include <vector>

namespace maglev::dynamics {

/// Forces along the track. Resistive terms are magnitudes; their direction is
/// always against the motion.
struct ForceBalance {
    double drive = 0.0;     ///< F_em [N]
    double friction = 0.0;  ///< F_f  [N], >= 0
    double drag = 0.0;      ///< F_B  [N], >= 0
};

/// Resistive model. Electromagnetic drag is linear in speed, F_B = c_b*|v|.
struct DragModel {
    double friction = 0.0;  ///< [N]
    double c_b = 0.0;       ///< [N s/m]

    ForceBalance at(double drive, double velocity) const;
    /// Drive force needed to hold `acceleration` at `velocity`.
    double drive_for(double mass, double acceleration, double velocity) const;
};

struct MoverState {
    double position = 0.0;     ///< [m] along track
    double velocity = 0.0;     ///< [m/s]
    double mass = 1.0;         ///< [kg]
    double gap = 1e-3;         ///< [m]
    double lev_current = 0.0;  ///< [A]
    double drive_iq = 0.0;     ///< [A]
};

struct TrajectorySample {
    double t = 0.0;
    double position = 0.0;
    double velocity = 0.0;
    double acceleration = 0.0;
};

using Trajectory = std::vector<TrajectorySample>;

using ForceSampler = std::function<ForceBalance(const MoverState&)>;

void validate(const ForceBalance& fb);
void validate(const MoverState& state);

/// Acceleration from the force balance. Resistance opposes `velocity_sign`.
/// At rest, a drive no larger than `static_threshold` leaves the mover at rest,
/// and resistance can never push a resting mover backwards.
double net_acceleration(const ForceBalance& fb, double mass, int velocity_sign,
                        double static_threshold = 0.0);

struct Kinematics {
    double velocity = 0.0;
    double displacement = 0.0;
};

/// v = v0 + a t, x = v0 t + a t^2 / 2. Throws DomainError for t < 0.
Kinematics closed_form(double v0, double acceleration, double t);

/// One semi-implicit Euler step (velocity first, then position with the new
/// velocity). Resistance can stop a moving mover but never reverse it.
/// Throws SimulationError tagged with `tick` on a non-finite force sample.
MoverState step(const MoverState& state, const ForceSampler& force, double dt, long long tick = 0,
                double static_threshold = 0.0);

/// Number of full steps of size dt in t_end, tolerant of representation error
/// in t_end / dt.
long long full_steps(double t_end, double dt);

/// Samples every dt from t = 0; a final shorter step lands exactly on t_end.
Trajectory simulate(const MoverState& initial, const ForceSampler& force, double t_end, double dt,
                    double static_threshold = 0.0);

}  // namespace maglev::dynamics
