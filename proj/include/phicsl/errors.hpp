// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phicsl {

// Argument and precondition violations are reported as std::invalid_argument.

// Non-finite values during integration. Carries the trajectory index when known.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, std::size_t trajectory = npos)
        : std::runtime_error(what), trajectory_(trajectory) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t trajectory() const { return trajectory_; }

private:
    std::size_t trajectory_;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::size_t line = 0, std::string key = {})
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), key_(std::move(key)) {}

    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phicsl
