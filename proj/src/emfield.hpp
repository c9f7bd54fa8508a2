#pragma once

// Electromagnetic field and force laws for the levitation and actuation
// models: coil-centre field, permanent-magnet dipole moment, serpentine trace
// fields and forces, Lorentz force, field energy density, and the
// parallel-plate gap actuator. All functions are pure and SI throughout.

#include <functional>
#include <numbers>

namespace maglev::emfield {

namespace constants {
/// Vacuum permeability [H/m].
inline constexpr double mu0 = 4.0e-7 * std::numbers::pi;
/// Standard gravity [m/s^2].
inline constexpr double g_grav = 9.81;
}  // namespace constants

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    double component(int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
    bool finite() const;
};

/// Permanent magnet. Mass is derived from density and volume.
struct MagnetSpec {
    double remanence = 0.0;  ///< B_r [T]
    double volume = 0.0;     ///< V_m [m^3]
    double density = 7500.0; ///< rho_m [kg/m^3]

    double mass() const { return density * volume; }
};

struct CoilSpec {
    double current = 0.0;  ///< [A]
    int turns = 1;
    double radius = 0.0;   ///< [m]
};

/// Pair of parallel serpentine traces at x = +/-half_offset in the z = 0 plane,
/// with the magnet held at `height` above them.
struct TraceGeometry {
    double half_offset = 0.0;  ///< [m]
    double height = 0.0;       ///< [m]
    double current = 0.0;      ///< [A]
};

struct GapGeometry {
    int turns = 1;
    double pole_area = 0.0;  ///< [m^2]
    double gap = 0.0;        ///< [m]
};

struct GapActuatorSpec {
    GapGeometry geometry;
    double current = 0.0;  ///< [A]
};

using FieldSampler = std::function<Vec3(const Vec3&)>;

void validate(const MagnetSpec& spec);
void validate(const CoilSpec& spec);
void validate(const TraceGeometry& geom);
void validate(const GapGeometry& geom);

/// Field at the centre of a single N-turn circular coil, mu0*I*N/(2R).
/// The value carries no axial falloff.
double coil_field(const CoilSpec& spec);

/// Dipole moment of a vertically magnetised permanent magnet, (0, 0, B_r*V_m/mu0).
Vec3 magnet_moment(const MagnetSpec& spec);

/// Central-difference step of 1e-6 times the given length scale.
double default_step(double characteristic_length);

/// Force on a fixed dipole, grad(m . B), by central differences of step h.
/// Throws DomainError naming the axis if any field sample is non-finite.
Vec3 dipole_force(const Vec3& moment, const FieldSampler& field, const Vec3& at, double h);

/// Field of one infinite straight wire lying along y at (wire_x, *, 0). A
/// positive current flows toward -y, so the vertical field is
/// mu0*I*(x - wire_x)/(2*pi*r^2).
Vec3 wire_field(double current, double wire_x, const Vec3& at);

/// Superposition of the two nearest trace wires, both carrying geom.current.
/// Throws DomainError when `at` lies on either wire.
Vec3 trace_field(const TraceGeometry& geom, const Vec3& at);

/// Horizontal force on the magnet at lateral position x, using the analytic
/// derivative of the two-trace field term.
double trace_force_x(const TraceGeometry& geom, const MagnetSpec& magnet, double x);

/// Peak speed reached when the trace force accelerates the magnet from rest at
/// x_start to x_end: sqrt(2/m * integral F_x dx), with the work integral
/// evaluated by adaptive Simpson quadrature. Throws DomainError on negative
/// net work or a massless magnet.
double max_transition_velocity(const TraceGeometry& geom, const MagnetSpec& magnet,
                               double x_start, double x_end);

double lorentz_force(double charge, double speed, double field, double theta);

/// B^2 / (2 mu0) [J/m^3].
double magnetic_energy_density(double field);

/// Magnetic-circuit inductance mu0*N^2*A/g, ignoring core reluctance and fringing.
double gap_inductance(const GapGeometry& geom);

/// Stored energy 1/2 L I^2 [J].
double gap_energy(const GapActuatorSpec& spec);

/// Attraction magnitude -dW/dg at constant current: mu0*N^2*A*I^2/(2 g^2).
/// The force acts to close the gap.
double gap_force(const GapActuatorSpec& spec);

/// Current that makes gap_force balance the weight of load_mass.
double levitation_current_for_load(const GapGeometry& geom, double load_mass);

}  // namespace maglev::emfield
