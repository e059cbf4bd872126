#pragma once

#include <stdexcept>

namespace quorumsim {

// Usage / configuration problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem problems; the CLI maps these to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace quorumsim
