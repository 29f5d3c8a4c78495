#pragma once

#include <stdexcept>
#include <string>

namespace cascan {

// Violated contract or malformed input (CLI maps this to exit code 1).
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A configured memory/size budget would be exceeded (exit code 3).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Persisted state failed its checksum or shape validation (exit code 1).
struct integrity_error : std::runtime_error {
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cascan
