#include "lmgf/errors.hpp"

namespace lmgf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSpectralPoint: return "DegenerateSpectralPoint";
    case ErrorKind::OnInterface: return "OnInterface";
    case ErrorKind::VacuumHasNoWavenumber: return "VacuumHasNoWavenumber";
    case ErrorKind::CoincidentDepths: return "CoincidentDepths";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::BranchPoint: return "BranchPoint";
    case ErrorKind::PhaseMismatch: return "PhaseMismatch";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::InvalidMaterial: return "InvalidMaterial";
    case ErrorKind::InvalidStack: return "InvalidStack";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace lmgf
