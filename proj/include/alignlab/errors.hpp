#pragma once

#include <stdexcept>
#include <string>

namespace alignlab {

// Error taxonomy shared by all modules. Everything derives from Error so
// callers can catch the whole family at the CLI boundary.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInput : public Error {
  public:
    explicit InvalidInput(const std::string& what) : Error("invalid input: " + what) {}
};

class InvalidParameter : public Error {
  public:
    explicit InvalidParameter(const std::string& what)
        : Error("invalid parameter: " + what) {}
};

class DimensionMismatch : public Error {
  public:
    explicit DimensionMismatch(const std::string& what)
        : Error("dimension mismatch: " + what) {}
};

class ContractViolation : public Error {
  public:
    explicit ContractViolation(const std::string& what)
        : Error("contract violation: " + what) {}
};

// Raised when an integrator produces a non-finite value; carries the grid
// index where it happened.
class IntegrationFailure : public Error {
  public:
    IntegrationFailure(const std::string& what, std::size_t grid_index)
        : Error("integration failure at grid index " + std::to_string(grid_index) +
                ": " + what),
          grid_index(grid_index) {}
    std::size_t grid_index;
};

class IoError : public Error {
  public:
    IoError(const std::string& what, const std::string& path)
        : Error("io error [" + path + "]: " + what), path(path) {}
    std::string path;
};

} // namespace alignlab
