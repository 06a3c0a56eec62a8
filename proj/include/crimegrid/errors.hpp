#pragma once

#include <stdexcept>
#include <string>

namespace crimegrid {

// Error taxonomy mirrors the CLI exit codes: config 2, missing artifact 3,
// data validation 4, anything else 5.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class MissingArtifactError : public std::runtime_error {
public:
    explicit MissingArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crimegrid
