#pragma once

#include <stdexcept>
#include <string>

namespace maglev {

/// Violated precondition or domain failure (bad geometry, singular demand,
/// negative work, unreachable station). Maps to exit code 1 at the CLI.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unparseable input. Maps to exit code 2 at the CLI.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside a simulation tick; carries the tick so callers can report it.
class SimulationError : public DomainError {
public:
    SimulationError(long long tick, const std::string& what)
        : DomainError("tick " + std::to_string(tick) + ": " + what), tick_(tick) {}

    long long tick() const noexcept { return tick_; }

private:
    long long tick_;
};

}  // namespace maglev
