#include "emfield.hpp"
#include "error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace maglev;
using namespace maglev::emfield;
using constants::mu0;

namespace {

constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Bracket of the two-trace field term, differentiated here by central
// differences instead of analytically.
double bracket(double x, double dx0, double d) {
    const double u = x - dx0;
    const double w = x + dx0;
    return u / (u * u + d * d) + w / (w * w + d * d);
}

// Five-point stencil: truncation error O(h^4) keeps the oracle well below 1e-8.
double bracket_slope_fd(double x, double dx0, double d) {
    const double h = 1e-3 * std::min(d, dx0);
    const auto f = [&](double t) { return bracket(t, dx0, d); };
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}

// Composite trapezoid rule on a uniform grid.
template <typename F>
double trapezoid(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

}  // namespace

TEST_CASE("coil_field") {
    CHECK(coil_field({1.0, 1, 0.5}) == doctest::Approx(1.25664e-6).epsilon(1e-5));
    CHECK(coil_field({0.0, 50, 0.1}) == 0.0);
    CHECK(coil_field({2.0, 100, 0.05}) == doctest::Approx(2.5133e-3).epsilon(1e-4));
    CHECK(coil_field({-2.0, 100, 0.05}) == doctest::Approx(-2.5133e-3).epsilon(1e-4));
    CHECK_THROWS_AS(coil_field({1.0, 0, 0.5}), DomainError);
    CHECK_THROWS_AS(coil_field({1.0, 1, 0.0}), DomainError);
    CHECK_THROWS_AS(coil_field({std::numeric_limits<double>::quiet_NaN(), 1, 0.5}), DomainError);
}

TEST_CASE("magnet_moment") {
    CHECK(magnet_moment({1.2, 0.0}) == Vec3{0, 0, 0});
    const Vec3 m = magnet_moment({1.2, 1e-6});
    CHECK(m.x == 0.0);
    CHECK(m.y == 0.0);
    CHECK(m.z == doctest::Approx(0.95493).epsilon(1e-5));
    CHECK_THROWS_AS(magnet_moment({-1.0, 1e-6}), DomainError);

    MagnetSpec spec{1.2, 2e-6, 7400.0};
    CHECK(spec.mass() == 7400.0 * 2e-6);
}

TEST_CASE("dipole_force on sampled fields") {
    SUBCASE("uniform field gives zero force") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int k = 0; k < 100; ++k) {
            const Vec3 b{u(rng), u(rng), u(rng)};
            const Vec3 m{u(rng), u(rng), u(rng)};
            const Vec3 f = dipole_force(m, [b](const Vec3&) { return b; }, {u(rng), u(rng), u(rng)}, 1e-6);
            CHECK(std::abs(f.x) <= 1e-12);
            CHECK(std::abs(f.y) <= 1e-12);
            CHECK(std::abs(f.z) <= 1e-12);
        }
    }
    SUBCASE("linear field") {
        const double c = 2.0;
        const Vec3 f = dipole_force({0, 0, 0.1}, [c](const Vec3& p) { return Vec3{0, 0, c * p.z}; }, {0.3, -0.2, 0.7},
                                    default_step(1.0));
        CHECK(f.x == doctest::Approx(0.0));
        CHECK(f.y == doctest::Approx(0.0));
        CHECK(f.z == doctest::Approx(0.2).epsilon(1e-9));
    }
    SUBCASE("non-finite sample names the axis") {
        const auto bad = [](const Vec3& p) {
            return Vec3{0, 0, p.y > 0.0 ? std::numeric_limits<double>::infinity() : 0.0};
        };
        try {
            dipole_force({0, 0, 1}, bad, {0, 0, 0}, 1e-3);
            FAIL("expected an error");
        } catch (const DomainError& e) {
            CHECK(std::string(e.what()).find('y') != std::string::npos);
        }
    }
    SUBCASE("bad step") { CHECK_THROWS_AS(dipole_force({}, [](const Vec3&) { return Vec3{}; }, {}, 0.0), DomainError); }
}

TEST_CASE("wire and trace fields") {
    const double i = 3.0;
    const double r = 0.02;
    SUBCASE("one wire has magnitude mu0 I / (2 pi r)") {
        const double expected = 4e-7 * pi * i / (2.0 * pi * r);
        CHECK(wire_field(i, 0.0, {r, 0, 0}).norm() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(wire_field(i, 0.0, {0, 0, r}).norm() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(wire_field(i, 0.01, {0.01 + 0.6 * r, 5.0, 0.8 * r}).norm() == doctest::Approx(expected).epsilon(1e-12));
        CHECK_THROWS_AS(wire_field(i, 0.0, {0, 1.0, 0}), DomainError);
    }
    SUBCASE("opposite currents: horizontal components cancel at the midpoint") {
        const double a = 0.01;
        const Vec3 p{0, 0, 0.004};
        const Vec3 b = wire_field(i, -a, p) + wire_field(-i, a, p);
        CHECK(std::abs(b.x) <= 1e-18);
        CHECK(std::abs(b.y) <= 1e-18);
        CHECK(std::abs(b.z) > 1e-6);
    }
    SUBCASE("trace pair superposes two equal wires") {
        const TraceGeometry g{0.01, 0.004, i};
        const Vec3 p{0.003, 0.0, 0.004};
        const Vec3 b = trace_field(g, p);
        const Vec3 sum = wire_field(i, -0.01, p) + wire_field(i, 0.01, p);
        CHECK(b.x == doctest::Approx(sum.x));
        CHECK(b.z == doctest::Approx(sum.z));
        CHECK(std::abs(trace_field(g, {0, 0, 0.004}).z) <= 1e-18);
        CHECK_THROWS_AS(trace_field(g, {0.01, 0.0, 0.0}), DomainError);
    }
    SUBCASE("linear in current") {
        const Vec3 p{0.002, 0.0, 0.003};
        const Vec3 b1 = trace_field({0.01, 0.003, 1.5}, p);
        const Vec3 b2 = trace_field({0.01, 0.003, 3.0}, p);
        CHECK(b2.x == doctest::Approx(2.0 * b1.x).epsilon(1e-14));
        CHECK(b2.z == doctest::Approx(2.0 * b1.z).epsilon(1e-14));
    }
}

TEST_CASE("trace_force_x") {
    const MagnetSpec mag{1.2, 1e-9};
    SUBCASE("height equal to half offset gives zero force at centre") {
        CHECK(std::abs(trace_force_x({1e-3, 1e-3, 1.0}, mag, 0.0)) <= 1e-20);
    }
    SUBCASE("reference geometry, checked against a finite-difference bracket slope") {
        const TraceGeometry g{1e-3, 0.5e-3, 1.0};
        const double oracle = 1.2 * 1e-9 * 1.0 / (2.0 * pi) * bracket_slope_fd(0.0, 1e-3, 0.5e-3);
        const double f = trace_force_x(g, mag, 0.0);
        CHECK(f == doctest::Approx(oracle).epsilon(1e-8));
        CHECK(f == doctest::Approx(-1.83e-4).epsilon(2e-3));
    }
    SUBCASE("far field decays") {
        const TraceGeometry g{1e-3, 0.5e-3, 1.0};
        const double near = std::abs(trace_force_x(g, mag, 0.0));
        CHECK(std::abs(trace_force_x(g, mag, 1.0)) < 1e-5 * near);
        CHECK(std::abs(trace_force_x(g, mag, -10.0)) < 1e-7 * near);
    }
    SUBCASE("analytic slope matches finite differences and is even in x") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> len(1e-4, 1e-2);
        std::uniform_real_distribution<double> span(-3.0, 3.0);
        for (int k = 0; k < 1000; ++k) {
            const double dx0 = len(rng);
            const double d = len(rng);
            const double x = span(rng) * dx0;
            const TraceGeometry g{dx0, d, 1.0};
            const double k0 = 1.2 * 1e-9 / (2.0 * pi);
            const double fd = k0 * bracket_slope_fd(x, dx0, d);
            const double f = trace_force_x(g, mag, x);
            const double scale = k0 / (d * d);
            CHECK(std::abs(f - fd) <= 1e-8 * std::max(std::abs(fd), 1e-4 * scale));
            CHECK(trace_force_x(g, mag, -x) == doctest::Approx(f).epsilon(1e-14));
        }
    }
}

TEST_CASE("max_transition_velocity") {
    const MagnetSpec mag{1.2, 1e-9, 7500.0};
    const TraceGeometry g{1e-3, 0.5e-3, 1.0};
    SUBCASE("zero current") { CHECK(max_transition_velocity({1e-3, 0.5e-3, 0.0}, mag, -1e-3, 0.0) == 0.0); }
    SUBCASE("matches a fine trapezoid rule and the closed-form work") {
        // The bracket rises from its minimum near x = -dx0 - d towards the centre.
        const double a = -1.4e-3;
        const double b = -0.2e-3;
        const double v = max_transition_velocity(g, mag, a, b);
        const double work_trap = trapezoid([&](double x) { return trace_force_x(g, mag, x); }, a, b, 200000);
        const double work_exact = 1.2 * 1e-9 * 1.0 / (2.0 * pi) * (bracket(b, 1e-3, 0.5e-3) - bracket(a, 1e-3, 0.5e-3));
        REQUIRE(work_exact > 0.0);
        CHECK(v == doctest::Approx(std::sqrt(2.0 * work_trap / mag.mass())).epsilon(1e-4));
        CHECK(v == doctest::Approx(std::sqrt(2.0 * work_exact / mag.mass())).epsilon(1e-10));
    }
    SUBCASE("mass cancels under joint scaling") {
        const double base = max_transition_velocity(g, mag, -1.4e-3, -0.2e-3);
        for (const double k : {2.0, 5.0, 10.0}) {
            const MagnetSpec scaled{mag.remanence, k * mag.volume, mag.density};
            CHECK(max_transition_velocity(g, scaled, -1.4e-3, -0.2e-3) == doctest::Approx(base).epsilon(1e-10));
        }
    }
    SUBCASE("negative work is an error") { CHECK_THROWS_AS(max_transition_velocity(g, mag, -6e-3, -1.6e-3), DomainError); }
    SUBCASE("empty interval is an error") { CHECK_THROWS_AS(max_transition_velocity(g, mag, 0.0, 0.0), DomainError); }
    SUBCASE("deterministic") {
        CHECK(max_transition_velocity(g, mag, -1.4e-3, -0.2e-3) == max_transition_velocity(g, mag, -1.4e-3, -0.2e-3));
    }
}

TEST_CASE("lorentz_force and energy density") {
    CHECK(lorentz_force(1.0, 1.0, 1.0, 0.0) == 0.0);
    CHECK(lorentz_force(1.0, 1.0, 1.0, pi / 2) == doctest::Approx(1.0));
    CHECK(lorentz_force(1.6e-19, 1e5, 0.5, pi / 6) == doctest::Approx(4e-15).epsilon(1e-12));
    CHECK(magnetic_energy_density(0.0) == 0.0);
    CHECK(magnetic_energy_density(1.0) == doctest::Approx(3.97887e5).epsilon(1e-5));
    CHECK(magnetic_energy_density(2.0) == doctest::Approx(4.0 * magnetic_energy_density(1.0)).epsilon(1e-15));
}

TEST_CASE("gap actuator") {
    const GapGeometry geom{100, 1e-4, 1e-3};
    SUBCASE("reference force and scaling") {
        CHECK(gap_force({geom, 0.0}) == 0.0);
        CHECK(gap_force({geom, 1.0}) == doctest::Approx(0.6283).epsilon(1e-4));
        CHECK(gap_force({{100, 1e-4, 0.5e-3}, 1.0}) == doctest::Approx(4.0 * gap_force({geom, 1.0})).epsilon(1e-14));
        CHECK_THROWS_AS(gap_force({{100, 1e-4, 0.0}, 1.0}), DomainError);
    }
    SUBCASE("force equals minus the energy slope at constant current (magnitude)") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> turns(1, 500);
        std::uniform_real_distribution<double> area(1e-5, 1e-2);
        std::uniform_real_distribution<double> gap(1e-4, 1e-2);
        std::uniform_real_distribution<double> cur(-20.0, 20.0);
        for (int k = 0; k < 500; ++k) {
            const GapGeometry gg{static_cast<int>(turns(rng)), area(rng), gap(rng)};
            const double i = cur(rng);
            const double h = 1e-6 * gg.gap;
            const auto energy = [&](double g) { return 0.5 * mu0 * gg.turns * gg.turns * gg.pole_area / g * i * i; };
            const double slope = (energy(gg.gap + h) - energy(gg.gap - h)) / (2.0 * h);
            CHECK(rel(gap_force({gg, i}), -slope) <= 1e-6);
        }
    }
    SUBCASE("levitation current") {
        CHECK(levitation_current_for_load(geom, 0.0) == 0.0);
        CHECK(levitation_current_for_load(geom, 0.06404) == doctest::Approx(1.000).epsilon(1e-3));
        CHECK(levitation_current_for_load(geom, 4.0) ==
              doctest::Approx(2.0 * levitation_current_for_load(geom, 1.0)).epsilon(1e-14));
        for (const double m : {0.01, 0.5, 1.0, 7.3, 120.0}) {
            const double i = levitation_current_for_load(geom, m);
            CHECK(rel(gap_force({geom, i}), m * constants::g_grav) <= 1e-9);
        }
        CHECK_THROWS_AS(levitation_current_for_load(geom, -1.0), DomainError);
    }
    SUBCASE("inductance and energy") {
        const double l = gap_inductance(geom);
        CHECK(l == doctest::Approx(mu0 * 1e4 * 1e-4 / 1e-3).epsilon(1e-15));
        CHECK(gap_energy({geom, 2.0}) == doctest::Approx(0.5 * l * 4.0).epsilon(1e-15));
    }
}
