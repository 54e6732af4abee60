#include "nhpd/errors.hpp"

namespace nhpd {

const char* category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::MeshIntegrity: return "mesh";
    case ErrorCategory::Model: return "model";
    case ErrorCategory::Correction: return "correction";
    case ErrorCategory::Solver: return "solver";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

}  // namespace nhpd
