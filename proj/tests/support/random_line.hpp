#pragma once

// Random conveyor lines for headway property checks: a ring with chords,
// four movers and a script of random station goals.

#include "line.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace maglev::testing {

struct RandomLine {
    line::LineConfig config;
    std::vector<line::TimedCommand> script;
};

inline RandomLine random_line(std::uint64_t seed, int movers = 4, double horizon = 10.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto node = [](int i) { return "N" + std::to_string(i); };

    for (;;) {
        RandomLine out;
        auto& cfg = out.config;
        cfg.dt = 1e-3;
        cfg.min_headway = 0.1 + 0.6 * u(rng);
        const int n = 4 + static_cast<int>(u(rng) * 3);
        for (int i = 0; i < n; ++i) {
            cfg.segments.push_back({"R" + std::to_string(i), node(i), node((i + 1) % n), 2.0 + 6.0 * u(rng),
                                    0.5 + 2.5 * u(rng), 0.5 + 2.5 * u(rng)});
        }
        const int chords = 1 + static_cast<int>(u(rng) * 2);
        for (int c = 0; c < chords; ++c) {
            const int a = static_cast<int>(u(rng) * n);
            const int b = (a + 2 + static_cast<int>(u(rng) * (n - 3))) % n;
            cfg.segments.push_back({"C" + std::to_string(c), node(a), node(b), 2.0 + 6.0 * u(rng), 0.5 + 2.5 * u(rng),
                                    0.5 + 2.5 * u(rng)});
        }
        const int stations = 2 + static_cast<int>(u(rng) * 3);
        for (int s = 0; s < stations; ++s) {
            cfg.stations.push_back({"S" + std::to_string(s), node(static_cast<int>(u(rng) * n)), 0.5 * u(rng), ""});
        }
        for (int m = 0; m < movers; ++m) {
            const auto& sg = cfg.segments[static_cast<std::size_t>(u(rng) * cfg.segments.size())];
            cfg.movers.push_back({"M" + std::to_string(m), sg.id, sg.length * u(rng), 0.5 + u(rng)});
        }
        if (!line::validate(cfg).empty()) continue;

        for (int m = 0; m < movers; ++m) {
            double t = 0.0;
            while (true) {
                t += horizon * 0.3 * u(rng);
                if (t >= horizon) break;
                out.script.push_back({t, "M" + std::to_string(m),
                                      cfg.stations[static_cast<std::size_t>(u(rng) * stations)].id});
            }
        }
        std::stable_sort(out.script.begin(), out.script.end(),
                         [](const auto& a, const auto& b) { return a.t < b.t; });
        return out;
    }
}

}  // namespace maglev::testing
