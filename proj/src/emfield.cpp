#include "emfield.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace maglev::emfield {

using constants::mu0;

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

// d/dx of u/(u^2 + d^2), summed over both traces. Geometry only.
double bracket_derivative(double half_offset, double height, double x) {
    const double d2 = height * height;
    double sum = 0.0;
    for (const double u : {x - half_offset, x + half_offset}) {
        const double u2 = u * u;
        const double den = u2 + d2;
        sum += (d2 - u2) / (den * den);
    }
    return sum;
}

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double fa, double b, double fb, double m, double fm,
                        double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson over a fixed set of equal panels so narrow peaks near the
// traces are never skipped by the first coarse estimate.
template <typename F>
double integrate(const F& f, double a, double b) {
    constexpr int panels = 64;
    const double width = (b - a) / panels;
    double scale = 0.0;
    for (int i = 0; i <= panels; ++i) {
        scale += std::abs(f(a + width * i));
    }
    scale *= width;
    const double tol = 1e-13 * scale / panels + 1e-300;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + width * i;
        const double hi = (i + 1 == panels) ? b : a + width * (i + 1);
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(mid);
        total += adaptive_simpson(f, lo, flo, hi, fhi, mid, fmid, simpson(lo, flo, hi, fhi, fmid),
                                  tol, 40);
    }
    return total;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

bool Vec3::finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

void validate(const MagnetSpec& spec) {
    require_finite(spec.remanence, "remanence");
    require_finite(spec.volume, "magnet volume");
    require_finite(spec.density, "magnet density");
    if (spec.remanence < 0.0) throw DomainError("remanence must be >= 0");
    if (spec.volume < 0.0) throw DomainError("magnet volume must be >= 0");
    if (spec.density <= 0.0) throw DomainError("magnet density must be > 0");
}

void validate(const CoilSpec& spec) {
    require_finite(spec.current, "coil current");
    require_finite(spec.radius, "coil radius");
    if (spec.turns < 1) throw DomainError("coil turns must be >= 1");
    if (spec.radius <= 0.0) throw DomainError("coil radius must be > 0");
}

void validate(const TraceGeometry& geom) {
    require_finite(geom.half_offset, "trace half offset");
    require_finite(geom.height, "trace height");
    require_finite(geom.current, "trace current");
    if (geom.half_offset <= 0.0) throw DomainError("trace half offset must be > 0");
    if (geom.height <= 0.0) throw DomainError("trace height must be > 0");
}

void validate(const GapGeometry& geom) {
    require_finite(geom.pole_area, "pole area");
    require_finite(geom.gap, "air gap");
    if (geom.turns < 1) throw DomainError("actuator turns must be >= 1");
    if (geom.pole_area <= 0.0) throw DomainError("pole area must be > 0");
    if (geom.gap <= 0.0) throw DomainError("air gap must be > 0");
}

double coil_field(const CoilSpec& spec) {
    validate(spec);
    return mu0 * spec.current * spec.turns / (2.0 * spec.radius);
}

Vec3 magnet_moment(const MagnetSpec& spec) {
    validate(spec);
    return {0.0, 0.0, spec.remanence * spec.volume / mu0};
}

double default_step(double characteristic_length) { return 1e-6 * characteristic_length; }

Vec3 dipole_force(const Vec3& moment, const FieldSampler& field, const Vec3& at, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("difference step must be positive and finite");
    }
    static constexpr const char* axis_names[] = {"x", "y", "z"};
    double grad[3] = {0.0, 0.0, 0.0};
    for (int axis = 0; axis < 3; ++axis) {
        Vec3 plus = at;
        Vec3 minus = at;
        (axis == 0 ? plus.x : axis == 1 ? plus.y : plus.z) += h;
        (axis == 0 ? minus.x : axis == 1 ? minus.y : minus.z) -= h;
        const Vec3 bp = field(plus);
        const Vec3 bm = field(minus);
        if (!bp.finite() || !bm.finite()) {
            throw DomainError(std::string("non-finite field sample along ") + axis_names[axis] + " axis");
        }
        grad[axis] = (moment.dot(bp) - moment.dot(bm)) / (2.0 * h);
    }
    return {grad[0], grad[1], grad[2]};
}

Vec3 wire_field(double current, double wire_x, const Vec3& at) {
    const double rx = at.x - wire_x;
    const double rz = at.z;
    const double r2 = rx * rx + rz * rz;
    if (r2 == 0.0) {
        throw DomainError("field point lies on a trace wire (singular field)");
    }
    const double k = mu0 * current / (2.0 * std::numbers::pi * r2);
    return {-k * rz, 0.0, k * rx};
}

Vec3 trace_field(const TraceGeometry& geom, const Vec3& at) {
    return wire_field(geom.current, geom.half_offset, at) + wire_field(geom.current, -geom.half_offset, at);
}

double trace_force_x(const TraceGeometry& geom, const MagnetSpec& magnet, double x) {
    validate(geom);
    validate(magnet);
    const double k = magnet.remanence * magnet.volume * geom.current / (2.0 * std::numbers::pi);
    return k * bracket_derivative(geom.half_offset, geom.height, x);
}

double max_transition_velocity(const TraceGeometry& geom, const MagnetSpec& magnet, double x_start,
                               double x_end) {
    validate(geom);
    validate(magnet);
    require_finite(x_start, "x_start");
    require_finite(x_end, "x_end");
    if (!(x_start < x_end)) throw DomainError("x_start must be < x_end");
    if (magnet.mass() <= 0.0) throw DomainError("magnet mass must be > 0");

    const auto f = [&](double x) { return bracket_derivative(geom.half_offset, geom.height, x); };
    const double bracket_work = integrate(f, x_start, x_end);
    const double work = magnet.remanence * magnet.volume * geom.current / (2.0 * std::numbers::pi) * bracket_work;
    if (work < 0.0) {
        throw DomainError("net work over the transition is negative; the magnet decelerates");
    }
    return std::sqrt(2.0 * work / magnet.mass());
}

double lorentz_force(double charge, double speed, double field, double theta) {
    return charge * speed * field * std::sin(theta);
}

double magnetic_energy_density(double field) { return field * field / (2.0 * mu0); }

double gap_inductance(const GapGeometry& geom) {
    validate(geom);
    return mu0 * geom.turns * geom.turns * geom.pole_area / geom.gap;
}

double gap_energy(const GapActuatorSpec& spec) {
    return 0.5 * gap_inductance(spec.geometry) * spec.current * spec.current;
}

double gap_force(const GapActuatorSpec& spec) {
    validate(spec.geometry);
    require_finite(spec.current, "actuator current");
    const auto& g = spec.geometry;
    const double n2 = static_cast<double>(g.turns) * g.turns;
    return mu0 * n2 * g.pole_area * spec.current * spec.current / (2.0 * g.gap * g.gap);
}

double levitation_current_for_load(const GapGeometry& geom, double load_mass) {
    validate(geom);
    require_finite(load_mass, "load mass");
    if (load_mass < 0.0) throw DomainError("load mass must be >= 0");
    const double n2 = static_cast<double>(geom.turns) * geom.turns;
    return geom.gap * std::sqrt(2.0 * load_mass * constants::g_grav / (mu0 * n2 * geom.pole_area));
}

}  // namespace maglev::emfield
