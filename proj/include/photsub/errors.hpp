#pragma once

#include <stdexcept>
#include <string>

namespace photsub {

enum class ErrorKind {
  InvalidSpace,
  Shape,
  ContractViolation,
  InvalidPartition,
  InvalidWiring,
  Parameter,
  NoPhoton,
  CutoffTooSmall,
  Grid,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library. The kind lets callers (the CLI in
// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpace: return "invalid space";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::ContractViolation: return "contract violation";
    case ErrorKind::InvalidPartition: return "invalid partition";
    case ErrorKind::InvalidWiring: return "invalid wiring";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::NoPhoton: return "no photon";
    case ErrorKind::CutoffTooSmall: return "cutoff too small";
    case ErrorKind::Grid: return "grid error";
  }
  return "error";
}

}  // namespace photsub
