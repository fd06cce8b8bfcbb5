#pragma once

#include <stdexcept>
#include <string>

namespace gpanel {

// Invalid configuration contents (bad DgpConfig / McConfig).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data: CSV cells, missing files, inconsistent panels.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse: dimension mismatch, argument out of its documented range.
class UsageError : public std::invalid_argument {
  public:
    explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Instance too large for an exact oracle.
class SizeError : public UsageError {
  public:
    explicit SizeError(const std::string& msg) : UsageError(msg) {}
};

}  // namespace gpanel
