#include "parabolica/errors.hpp"

namespace parabolica {

std::string_view to_string(Failure kind) {
    switch (kind) {
        case Failure::Divergence: return "Divergence";
        case Failure::NonConvergence: return "NonConvergence";
        case Failure::PeriodNotExact: return "PeriodNotExact";
        case Failure::SingularImplicit: return "SingularImplicit";
        case Failure::JacobianSingular: return "JacobianSingular";
        case Failure::SeedCollision: return "SeedCollision";
        case Failure::MultiplierOne: return "MultiplierOne";
        case Failure::BranchUndefined: return "BranchUndefined";
        case Failure::InsideOrUndecided: return "InsideOrUndecided";
        case Failure::NewtonLost: return "NewtonLost";
        case Failure::AllInterior: return "AllInterior";
        case Failure::DiskDegenerate: return "DiskDegenerate";
    }
    return "Unknown";
}

NumericalError::NumericalError(Failure kind, std::string_view operation, const std::string& detail)
    : std::runtime_error(std::string(operation) + ": " + std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      operation_(operation) {}

PreconditionError::PreconditionError(std::string_view operation, const std::string& detail)
    : std::invalid_argument(std::string(operation) + ": " + detail), operation_(operation) {}

}  // namespace parabolica
