#pragma once

#include <stdexcept>
#include <string>

namespace ehdg {

// Malformed arguments (bad labels, non-unit normals, points outside the reference simplex).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Physically invalid material parameters.
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mesh topology or file format problems.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ehdg
