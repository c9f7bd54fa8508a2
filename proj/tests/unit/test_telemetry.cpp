#include "error.hpp"
#include "telemetry.hpp"

#include <doctest.h>

#include <json.hpp>

#include <clocale>
#include <limits>
#include <random>
#include <sstream>

using namespace maglev;
using namespace maglev::telemetry;

namespace {

std::vector<TelemetryRecord> constant_run(const std::string& mover, double t0, double t1, double dt, double lev) {
    std::vector<TelemetryRecord> out;
    const auto n = static_cast<long long>(std::llround((t1 - t0) / dt));
    for (long long k = 0; k <= n; ++k) {
        TelemetryRecord r;
        r.t = t0 + k * dt;
        r.mover = mover;
        r.position = 0.5 * static_cast<double>(k) * dt;
        r.velocity = 0.5;
        r.gap = 1e-3;
        r.lev_current = lev;
        out.push_back(r);
    }
    return out;
}

line::Event event(double t, line::EventType type) { return {t, 0, "m", type, "s"}; }

}  // namespace

TEST_CASE("zscore_anomalies") {
    SUBCASE("constant series") {
        const std::vector<double> x(100, 3.25);
        CHECK(zscore_anomalies(x, 10, 3.0).empty());
    }
    SUBCASE("infinite threshold") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n(0.0, 1.0);
        std::vector<double> x(200);
        for (auto& v : x) v = n(rng);
        x[150] = 1e6;
        CHECK(zscore_anomalies(x, 10, std::numeric_limits<double>::infinity()).empty());
    }
    SUBCASE("one 10 sigma spike in unit-variance noise") {
        // Alternating +/-1 has mean 0 and population sigma 1 over any even window.
        std::vector<double> x(300);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? 1.0 : -1.0;
        x[173] = 10.0;
        const auto flags = zscore_anomalies(x, 20, 5.0);
        CHECK(flags == std::vector<std::size_t>{173});
    }
    SUBCASE("zero-spread window flags any deviation") {
        std::vector<double> x(30, 1.0);
        x[25] = 1.0 + 1e-9;
        CHECK(zscore_anomalies(x, 5, 100.0) == std::vector<std::size_t>{25});
    }
    SUBCASE("first window points never flagged, short series empty") {
        std::vector<double> x{0.0, 0.0, 0.0, 50.0};
        CHECK(zscore_anomalies(x, 3, 1.0) == std::vector<std::size_t>{3});
        CHECK(zscore_anomalies(x, 4, 1.0).empty());
        CHECK(zscore_anomalies(x, 10, 1.0).empty());
    }
    SUBCASE("bad arguments") {
        const std::vector<double> x(10, 0.0);
        CHECK_THROWS_AS(zscore_anomalies(x, 1, 1.0), DomainError);
        CHECK_THROWS_AS(zscore_anomalies(x, 3, 0.0), DomainError);
    }
    SUBCASE("affine covariance") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> n(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.1, 50.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(400);
            for (auto& v : x) v = n(rng);
            for (int s = 0; s < 5; ++s) x[static_cast<std::size_t>(u(rng) * 7)] += 8.0;
            const double a = u(rng);
            const double b = u(rng) - 25.0;
            std::vector<double> y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
            CHECK(zscore_anomalies(x, 16, 2.5) == zscore_anomalies(y, 16, 2.5));
        }
    }
}

TEST_CASE("summarize") {
    SUBCASE("empty run") {
        const auto s = summarize({}, {});
        CHECK(s.jobs_completed == 0);
        CHECK(s.throughput == 0.0);
        CHECK(s.distance_per_mover.empty());
        CHECK(s.energy_proxy == 0.0);
        CHECK(s.headway_interventions == 0);
    }
    SUBCASE("energy proxy by the rectangle rule") {
        const auto recs = constant_run("m", 0.0, 10.0, 1e-3, 1.0);
        const auto s = summarize(recs, {});
        CHECK(s.energy_proxy == doctest::Approx(10.0).epsilon(1e-9));
        REQUIRE(s.distance_per_mover.size() == 1);
        CHECK(s.distance_per_mover[0].second == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("throughput") {
        const std::vector<line::Event> ev{event(10, line::EventType::DwellComplete),
                                          event(20, line::EventType::Arrival),
                                          event(30, line::EventType::DwellComplete),
                                          event(50, line::EventType::DwellComplete),
                                          event(51, line::EventType::HeadwayIntervention)};
        const auto s = summarize({}, ev, 60.0);
        CHECK(s.jobs_completed == 3);
        CHECK(s.throughput == doctest::Approx(0.05));
        CHECK(s.headway_interventions == 1);
        // Without an explicit duration the record span is used.
        const auto recs = constant_run("m", 0.0, 60.0, 1.0, 0.0);
        CHECK(summarize(recs, ev).throughput == doctest::Approx(0.05));
    }
    SUBCASE("counters add over concatenated runs") {
        auto a = constant_run("m", 0.0, 4.0, 0.01, 0.5);
        auto b = constant_run("m", 4.0, 9.0, 0.01, 0.5);
        for (auto& r : b) r.position += a.back().position;
        const std::vector<line::Event> ea{event(1, line::EventType::DwellComplete),
                                          event(2, line::EventType::HeadwayIntervention)};
        const std::vector<line::Event> eb{event(5, line::EventType::DwellComplete),
                                          event(6, line::EventType::DwellComplete)};
        const auto sa = summarize(a, ea);
        const auto sb = summarize(b, eb);
        auto all = a;
        all.insert(all.end(), b.begin() + 1, b.end());
        auto eall = ea;
        eall.insert(eall.end(), eb.begin(), eb.end());
        const auto s = summarize(all, eall);
        CHECK(s.jobs_completed == sa.jobs_completed + sb.jobs_completed);
        CHECK(s.headway_interventions == sa.headway_interventions + sb.headway_interventions);
        CHECK(s.distance_per_mover[0].second ==
              doctest::Approx(sa.distance_per_mover[0].second + sb.distance_per_mover[0].second));
    }
    SUBCASE("interleaved movers are tracked separately") {
        std::vector<TelemetryRecord> recs;
        for (int k = 0; k <= 10; ++k) {
            recs.push_back({0.1 * k, "a", 1.0 * k, 0, 1e-3, 2.0, 0.0, ""});
            recs.push_back({0.1 * k, "b", -0.5 * k, 0, 1e-3, 0.0, 1.0, ""});
        }
        const auto s = summarize(recs, {});
        REQUIRE(s.distance_per_mover.size() == 2);
        CHECK(s.distance_per_mover[0].first == "a");
        CHECK(s.distance_per_mover[0].second == doctest::Approx(10.0));
        CHECK(s.distance_per_mover[1].second == doctest::Approx(5.0));
        CHECK(s.energy_proxy == doctest::Approx(4.0 * 1.0 + 1.0 * 1.0));
    }
}

TEST_CASE("csv and json output") {
    std::vector<TelemetryRecord> recs{{0.0, "m1", 0.0, 0.0, 1e-3, 3.95, 0.0, ""},
                                      {0.5, "m1", 0.125, -0.5, 0.00101, 3.9, 1.25, "arrival"}};
    std::ostringstream out;
    write_csv(out, recs);
    CHECK(out.str() ==
          "t,mover,position,velocity,gap,lev_current,drive_iq,event\n"
          "0,m1,0,0,0.001,3.95,0,\n"
          "0.5,m1,0.125,-0.5,0.00101,3.9,1.25,arrival\n");

    SUBCASE("locale does not change the decimal point") {
        if (std::setlocale(LC_ALL, "de_DE.UTF-8")) {
            std::ostringstream again;
            write_csv(again, recs);
            CHECK(again.str() == out.str());
            std::setlocale(LC_ALL, "C");
        }
    }
    SUBCASE("round-trip precision") {
        const double v = 0.1 + 0.2;
        CHECK(std::stod(format_number(v)) == v);
        CHECK(format_number(-0.0) == "0");
    }
    SUBCASE("summary fields") {
        RunSummary s;
        s.jobs_completed = 2;
        s.throughput = 0.25;
        s.distance_per_mover = {{"m1", 8.0}};
        s.energy_proxy = 1.5;
        s.headway_interventions = 3;
        const auto j = nlohmann::json::parse(summary_json(s));
        CHECK(j["jobs_completed"] == 2);
        CHECK(j["throughput"] == 0.25);
        CHECK(j["distance_per_mover"]["m1"] == 8.0);
        CHECK(j["energy_proxy"] == 1.5);
        CHECK(j["headway_interventions"] == 3);
    }
    SUBCASE("events") {
        const std::vector<line::Event> ev{{3.0, 3000, "m1", line::EventType::Arrival, "place"},
                                          {3.1, 3100, "m2", line::EventType::HeadwayIntervention, ""}};
        const auto j = nlohmann::json::parse(events_json(ev));
        REQUIRE(j["events"].size() == 2);
        CHECK(j["events"][0]["type"] == "arrival");
        CHECK(j["events"][0]["station"] == "place");
        CHECK(j["events"][1]["type"] == "headway");
        CHECK_FALSE(j["events"][1].contains("station"));
        CHECK(nlohmann::json::parse(events_json({}))["events"].empty());
    }
}
