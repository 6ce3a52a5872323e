#pragma once

#include <stdexcept>
#include <string>

namespace okdv {

struct UnsupportedInverse : std::runtime_error {
    explicit UnsupportedInverse(const std::string& what) : std::runtime_error(what) {}
};

struct NotExact : std::runtime_error {
    explicit NotExact(const std::string& what) : std::runtime_error(what) {}
};

struct DepthUnderflow : std::runtime_error {
    explicit DepthUnderflow(const std::string& what) : std::runtime_error(what) {}
};

struct ExpOnUnitFull : std::runtime_error {
    explicit ExpOnUnitFull(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfWindow : std::runtime_error {
    explicit OutOfWindow(const std::string& what) : std::runtime_error(what) {}
};

struct RecursionStall : std::runtime_error {
    explicit RecursionStall(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace okdv
