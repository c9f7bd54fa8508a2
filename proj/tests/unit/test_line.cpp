#include "error.hpp"
#include "line.hpp"

#include "../support/random_line.hpp"

#include <doctest.h>

#include <cmath>

using namespace maglev;
using namespace maglev::line;

namespace {

LineConfig loop(double headway = 0.2) {
    LineConfig c;
    c.dt = 1e-3;
    c.min_headway = headway;
    c.segments = {{"AB", "A", "B", 4.0, 2.0, 2.0}, {"BA", "B", "A", 4.0, 2.0, 2.0}};
    c.stations = {{"pick", "A", 0.5, "pick"}, {"place", "B", 0.5, "place"}};
    return c;
}

std::vector<Event> of_type(const std::vector<Event>& events, EventType t) {
    std::vector<Event> out;
    for (const auto& e : events) {
        if (e.type == t) out.push_back(e);
    }
    return out;
}

}  // namespace

TEST_CASE("validate") {
    auto c = loop();
    c.movers = {{"m1", "AB", 0.0, 1.0}};
    CHECK(validate(c).empty());

    SUBCASE("station on a missing node") {
        c.stations.push_back({"ghost", "Z", 1.0, ""});
        const auto d = validate(c);
        REQUIRE(d.size() == 1);
        CHECK(d[0].find("ghost") != std::string::npos);
    }
    SUBCASE("movers too close") {
        c.movers.push_back({"m2", "AB", 0.0, 1.0});
        const auto d = validate(c);
        REQUIRE(d.size() == 1);
        CHECK(d[0].find("min_headway") != std::string::npos);
        CHECK(d[0].find("m1") != std::string::npos);
    }
    SUBCASE("separation counts across nodes") {
        c.movers = {{"m1", "AB", 3.95, 1.0}, {"m2", "BA", 0.05, 1.0}};
        CHECK(validate(c).size() == 1);
    }
    SUBCASE("other invariants") {
        c.min_headway = 0.0;
        c.segments.push_back({"XY", "X", "Y", 1.0, 1.0, 1.0});
        c.stations.push_back({"neg", "A", -1.0, ""});
        c.movers.push_back({"m3", "AB", 9.0, 1.0});
        CHECK(validate(c).size() == 4);
    }
    CHECK_THROWS_AS(LineSimulator(LineConfig{{{"AB", "A", "A", 1.0, 1.0, 1.0}}, {}, {}, 0.1, 1e-3}), DomainError);
}

TEST_CASE("advance basics") {
    SUBCASE("no movers only moves the clock") {
        const auto c = loop();
        LineState s = LineSimulator(c).initial_state();
        for (int k = 1; k <= 10; ++k) {
            const double before = s.clock;
            s = advance(s, c, {});
            CHECK(s.tick == k);
            CHECK(s.clock - before == doctest::Approx(c.dt).epsilon(1e-9));
            CHECK(s.events.empty());
        }
    }
    SUBCASE("unknown mover or station leaves the state untouched") {
        auto c = loop();
        c.movers = {{"m1", "BA", 4.0, 1.0}};
        const LineSimulator sim(c);
        LineState s = sim.initial_state();
        const std::vector<GoalCommand> bad_mover{{"m1", "place"}, {"nobody", "place"}};
        CHECK_THROWS_AS(sim.advance(s, bad_mover), DomainError);
        const std::vector<GoalCommand> bad_station{{"m1", "nowhere"}};
        CHECK_THROWS_AS(sim.advance(s, bad_station), DomainError);
        CHECK(s.tick == 0);
        CHECK(s.movers[0].queue.empty());
    }
}

TEST_CASE("single move arrives on the trapezoid schedule") {
    auto c = loop();
    c.movers = {{"m1", "BA", 4.0, 1.0}};
    const std::vector<TimedCommand> script{{0.0, "m1", "place"}};
    const auto r = run(c, script, 4.0);
    const auto arrivals = of_type(r.events, EventType::Arrival);
    REQUIRE(arrivals.size() == 1);
    CHECK(std::abs(arrivals[0].t - 3.0) <= c.dt);
    CHECK(arrivals[0].station == "place");
    CHECK(r.final_state.movers[0].odometer == doctest::Approx(4.0));

    // Mid-cruise the mover runs at the segment limit.
    const auto& traj = r.trajectories[0].samples;
    CHECK(traj[1500].velocity == doctest::Approx(2.0));
    CHECK(traj[1500].position == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("round trip reproduces two arrivals") {
    auto c = loop();
    c.movers = {{"m1", "BA", 4.0, 1.0}};
    const std::vector<TimedCommand> script{{0.0, "m1", "place"}, {0.0, "m1", "pick"}};
    const auto r = run(c, script, 8.0);
    const auto arrivals = of_type(r.events, EventType::Arrival);
    REQUIRE(arrivals.size() == 2);
    // 3 s move, 0.5 s dwell, 3 s move back.
    CHECK(std::abs(arrivals[0].t - 3.0) <= c.dt);
    CHECK(std::abs(arrivals[1].t - 6.5) <= c.dt);
    const auto done = of_type(r.events, EventType::DwellComplete);
    REQUIRE(done.size() == 2);
    CHECK(std::abs(done[0].t - 3.5) <= c.dt);
    CHECK(std::abs(done[1].t - 7.0) <= c.dt);

    SUBCASE("replay is bit-identical") {
        const auto again = run(c, script, 8.0);
        REQUIRE(again.events.size() == r.events.size());
        for (std::size_t i = 0; i < r.events.size(); ++i) {
            CHECK(again.events[i].t == r.events[i].t);
            CHECK(again.events[i].tick == r.events[i].tick);
            CHECK(again.events[i].mover == r.events[i].mover);
            CHECK(again.events[i].type == r.events[i].type);
        }
        CHECK(again.final_state.movers[0].odometer == r.final_state.movers[0].odometer);
    }
}

TEST_CASE("empty script leaves movers idle") {
    auto c = loop();
    c.movers = {{"m1", "AB", 1.0, 1.0}, {"m2", "BA", 1.0, 1.0}};
    const auto r = run(c, {}, 2.0);
    CHECK(r.events.empty());
    for (const auto& m : r.final_state.movers) CHECK(m.odometer == 0.0);
}

TEST_CASE("follower commanded into a parked leader keeps its distance") {
    auto c = loop(0.3);
    c.segments[0].length = 8.0;
    c.movers = {{"follower", "AB", 0.0, 1.0}, {"leader", "AB", 3.0, 1.0}};
    const std::vector<TimedCommand> script{{0.0, "follower", "place"}, {2.5, "leader", "place"}};
    double worst = 1e9;
    int braking = 0;
    const auto r = run(c, script, 12.0, [&](const LineSimulator&, const LineState& s) {
        worst = std::min(worst, LineSimulator::min_same_segment_separation(s));
    });
    for (const auto& e : r.events) braking += e.type == EventType::HeadwayIntervention;
    CHECK(worst >= c.min_headway - 1e-12);
    CHECK(braking > 0);
    // The leader reaches the station; the follower waits one headway short of it.
    CHECK(of_type(r.events, EventType::Arrival).size() == 1);
    const auto& f = r.final_state.movers[0];
    CHECK(f.offset == doctest::Approx(8.0 - 0.3).epsilon(1e-6));
}

TEST_CASE("headway, continuity and adjacency on random lines") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto rl = testing::random_line(seed, 4, 6.0);
        const LineSimulator sim(rl.config);
        const auto& g = sim.graph();
        LineState prev = sim.initial_state();
        bool first = true;
        double worst = 1e9;
        run(rl.config, rl.script, 6.0, [&](const LineSimulator&, const LineState& s) {
            worst = std::min(worst, LineSimulator::min_same_segment_separation(s));
            if (!first) {
                for (std::size_t i = 0; i < s.movers.size(); ++i) {
                    const auto& a = prev.movers[i];
                    const auto& b = s.movers[i];
                    const double step = g.distance({a.segment, a.offset}, {b.segment, b.offset});
                    const auto& sa = g.segment(a.segment);
                    const auto& sb = g.segment(b.segment);
                    const double vmax = std::max(sa.v_limit, sb.v_limit);
                    const double amax = std::max(sa.a_limit, sb.a_limit);
                    const double dt = rl.config.dt;
                    CHECK(step <= vmax * dt + 0.5 * amax * dt * dt + 1e-9);
                    CHECK(b.offset >= 0.0);
                    CHECK(b.offset <= sb.length);
                    if (a.segment != b.segment) {
                        // Only onto a segment leaving the node just reached.
                        CHECK(sa.to_node == sb.from_node);
                    }
                }
            }
            first = false;
            prev = s;
        });
        CHECK(worst >= rl.config.min_headway - 1e-12);
    }
}
