#include "maglev/maglev.h"

#include "error.hpp"
#include "runner.hpp"
#include "scenario.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#ifndef MAGLEV_VERSION
#define MAGLEV_VERSION "0.0.0"
#endif

struct maglev_scenario {
    maglev::scenario::Loaded loaded;
};

namespace {

thread_local std::string last_error;

maglev_status fail(maglev_status code, std::string msg) {
    last_error = std::move(msg);
    return code;
}

std::string joined_diagnostics(const maglev::scenario::Loaded& l) {
    std::string msg = "scenario has " + std::to_string(l.diagnostics.size()) + " problem(s)";
    for (const auto& d : l.diagnostics) msg += "\n" + d;
    return msg;
}

template <typename F>
maglev_status guarded(F&& f) {
    last_error.clear();
    try {
        return f();
    } catch (const maglev::SimulationError& e) {
        return fail(MAGLEV_ERR_DOMAIN, "simulation failed at tick " + std::to_string(e.tick()) + ": " + e.what());
    } catch (const maglev::DomainError& e) {
        return fail(MAGLEV_ERR_DOMAIN, e.what());
    } catch (const maglev::IoError& e) {
        return fail(MAGLEV_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MAGLEV_ERR_DOMAIN, "out of memory");
    } catch (const std::exception& e) {
        return fail(MAGLEV_ERR_DOMAIN, e.what());
    }
}

maglev_status usable(const maglev_scenario* s) {
    if (!s) return fail(MAGLEV_ERR_ARGUMENT, "null scenario handle");
    if (!s->loaded.ok()) return fail(MAGLEV_ERR_DOMAIN, joined_diagnostics(s->loaded));
    return MAGLEV_OK;
}

maglev_status finish_load(maglev::scenario::Loaded loaded, maglev_scenario** out) {
    auto* h = new maglev_scenario{std::move(loaded)};
    *out = h;
    if (!h->loaded.ok()) return fail(MAGLEV_ERR_DOMAIN, joined_diagnostics(h->loaded));
    return MAGLEV_OK;
}

char* dup(const std::string& s) {
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

}  // namespace

extern "C" {

const char* maglev_version(void) { return MAGLEV_VERSION; }

const char* maglev_last_error(void) { return last_error.c_str(); }

void maglev_string_free(char* s) { std::free(s); }

maglev_status maglev_scenario_load(const char* path, maglev_scenario** out) {
    if (!path || !out) return fail(MAGLEV_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { return finish_load(maglev::scenario::load(path), out); });
}

maglev_status maglev_scenario_parse(const char* json_text, maglev_scenario** out) {
    if (!json_text || !out) return fail(MAGLEV_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { return finish_load(maglev::scenario::parse(json_text), out); });
}

void maglev_scenario_free(maglev_scenario* scenario) { delete scenario; }

size_t maglev_scenario_diagnostic_count(const maglev_scenario* scenario) {
    return scenario ? scenario->loaded.diagnostics.size() : 0;
}

const char* maglev_scenario_diagnostic(const maglev_scenario* scenario, size_t index) {
    if (!scenario || index >= scenario->loaded.diagnostics.size()) return nullptr;
    return scenario->loaded.diagnostics[index].c_str();
}

maglev_status maglev_scenario_set_param(maglev_scenario* scenario, const char* dotted_path, double value) {
    if (!scenario || !dotted_path) return fail(MAGLEV_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto doc = scenario->loaded.document;
        maglev::scenario::set_param(doc, dotted_path, value);
        scenario->loaded = maglev::scenario::from_document(std::move(doc));
        if (!scenario->loaded.ok()) return fail(MAGLEV_ERR_DOMAIN, joined_diagnostics(scenario->loaded));
        return MAGLEV_OK;
    });
}

maglev_status maglev_simulate(const maglev_scenario* scenario, const char* out_dir) {
    if (!out_dir) return fail(MAGLEV_ERR_ARGUMENT, "null output directory");
    if (const auto st = usable(scenario); st != MAGLEV_OK) return st;
    return guarded([&] {
        maglev::runner::write_outputs(maglev::runner::simulate(scenario->loaded.scenario), out_dir);
        return MAGLEV_OK;
    });
}

maglev_status maglev_route(const maglev_scenario* scenario, const char* from_node, const char* to_node,
                           char** json_out) {
    if (!from_node || !to_node || !json_out) return fail(MAGLEV_ERR_ARGUMENT, "null argument");
    *json_out = nullptr;
    if (const auto st = usable(scenario); st != MAGLEV_OK) return st;
    return guarded([&] {
        *json_out = dup(maglev::runner::route_json(scenario->loaded.scenario, from_node, to_node));
        return MAGLEV_OK;
    });
}

maglev_status maglev_dispatch(const maglev_scenario* scenario, const char* method, char** json_out) {
    if (!method || !json_out) return fail(MAGLEV_ERR_ARGUMENT, "null argument");
    *json_out = nullptr;
    if (const auto st = usable(scenario); st != MAGLEV_OK) return st;
    return guarded([&] {
        *json_out = dup(maglev::runner::dispatch_json(scenario->loaded.scenario, method));
        return MAGLEV_OK;
    });
}

maglev_status maglev_sweep(const maglev_scenario* scenario, const char* dotted_path, const double* values,
                           size_t count, const char* out_dir) {
    if (!dotted_path || (!values && count > 0) || !out_dir) return fail(MAGLEV_ERR_ARGUMENT, "null argument");
    if (const auto st = usable(scenario); st != MAGLEV_OK) return st;
    return guarded([&] {
        maglev::runner::sweep(scenario->loaded.document, dotted_path, std::vector<double>(values, values + count),
                              out_dir);
        return MAGLEV_OK;
    });
}

}  // extern "C"
