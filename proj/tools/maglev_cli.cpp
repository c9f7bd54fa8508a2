#include "maglev/maglev.h"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_domain = 1;
constexpr int exit_io = 2;

struct ScenarioDeleter {
    void operator()(maglev_scenario* s) const { maglev_scenario_free(s); }
};
using ScenarioPtr = std::unique_ptr<maglev_scenario, ScenarioDeleter>;

struct StringDeleter {
    void operator()(char* s) const { maglev_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

int exit_code(maglev_status st) {
    switch (st) {
    case MAGLEV_OK: return exit_ok;
    case MAGLEV_ERR_DOMAIN: return exit_domain;
    default: return exit_io;
    }
}

int report(maglev_status st) {
    if (st != MAGLEV_OK) std::cerr << "error: " << maglev_last_error() << '\n';
    return exit_code(st);
}

// Loads a scenario, printing diagnostics. Returns nullptr with `code` set on failure.
ScenarioPtr open(const std::string& path, int& code) {
    maglev_scenario* raw = nullptr;
    const maglev_status st = maglev_scenario_load(path.c_str(), &raw);
    ScenarioPtr s(raw);
    if (st == MAGLEV_OK) return s;
    if (s) {
        for (size_t i = 0; i < maglev_scenario_diagnostic_count(s.get()); ++i) {
            std::cerr << path << ": " << maglev_scenario_diagnostic(s.get(), i) << '\n';
        }
    } else {
        std::cerr << "error: " << maglev_last_error() << '\n';
    }
    code = exit_code(st);
    return nullptr;
}

std::optional<std::vector<double>> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t end = csv.find(',', pos);
        if (end == std::string::npos) end = csv.size();
        std::string item = csv.substr(pos, end - pos);
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        item = first == std::string::npos ? "" : item.substr(first, last - first + 1);
        if (!item.empty()) {
            double v = 0.0;
            const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
            if (res.ec != std::errc() || res.ptr != item.data() + item.size()) return std::nullopt;
            out.push_back(v);
        }
        pos = end + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maglev conveyor line simulator"};
    app.require_subcommand(1);

    std::string file;
    std::string out_dir;

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("file", file, "Scenario JSON")->required();

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write telemetry");
    simulate->add_option("file", file, "Scenario JSON")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();

    std::string from;
    std::string to;
    auto* route = app.add_subcommand("route", "Fastest route between two nodes");
    route->add_option("file", file, "Scenario JSON")->required();
    route->add_option("--from", from, "Start node")->required();
    route->add_option("--to", to, "End node")->required();

    std::string param;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "Simulate once per parameter value");
    sweep->add_option("file", file, "Scenario JSON")->required();
    sweep->add_option("--param", param, "Dotted path of a numeric field")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();

    std::string method = "local";
    auto* dispatch = app.add_subcommand("dispatch", "Assign the scenario's jobs to movers");
    dispatch->add_option("file", file, "Scenario JSON")->required();
    dispatch->add_option("--method", method, "greedy, local or brute")->check(CLI::IsMember({"greedy", "local", "brute"}));

    auto* version = app.add_subcommand("version", "Print the library version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_io;
    }

    if (version->parsed()) {
        std::cout << maglev_version() << '\n';
        return exit_ok;
    }

    int code = exit_ok;
    ScenarioPtr sc = open(file, code);
    if (validate->parsed()) {
        if (code == exit_ok) std::cerr << file << ": ok\n";
        return code;
    }
    if (!sc) return code;

    if (simulate->parsed()) return report(maglev_simulate(sc.get(), out_dir.c_str()));

    if (route->parsed() || dispatch->parsed()) {
        char* raw = nullptr;
        const maglev_status st = route->parsed() ? maglev_route(sc.get(), from.c_str(), to.c_str(), &raw)
                                                 : maglev_dispatch(sc.get(), method.c_str(), &raw);
        OwnedString json(raw);
        if (st == MAGLEV_OK) std::cout << json.get();
        return report(st);
    }

    if (sweep->parsed()) {
        const auto parsed = parse_values(values);
        if (!parsed) {
            std::cerr << "error: --values must be comma-separated numbers\n";
            return exit_io;
        }
        if (parsed->empty()) {
            std::cerr << "error: --values is empty\n";
            return exit_domain;
        }
        return report(maglev_sweep(sc.get(), param.c_str(), parsed->data(), parsed->size(), out_dir.c_str()));
    }
    return exit_ok;
}
