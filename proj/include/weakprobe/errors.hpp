#pragma once

#include <stdexcept>
#include <string>

namespace weakprobe {

// Bad parameters or config input; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical degeneracy (dead branch, degenerate propagator,
// impossible reconstruction); maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace weakprobe
