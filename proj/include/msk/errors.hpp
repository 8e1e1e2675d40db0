#pragma once

#include <stdexcept>
#include <string>

namespace msk {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Caller violated an interface contract (shape mismatch, bad index, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// Bad configuration file or incompatible settings.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Forward dynamics produced a non-finite state.
class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(const std::string& msg, int substep)
        : std::runtime_error(msg), substep(substep) {}
    int substep;
};

}  // namespace msk
