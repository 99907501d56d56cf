#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parabolica {

/// Numerical failure kinds surfaced by the solvers and experiments.
enum class Failure {
    Divergence,
    NonConvergence,
    PeriodNotExact,
    SingularImplicit,
    JacobianSingular,
    SeedCollision,
    MultiplierOne,
    BranchUndefined,
    InsideOrUndecided,
    NewtonLost,
    AllInterior,
    DiskDegenerate,
};

std::string_view to_string(Failure kind);

/// A computation ran but could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    NumericalError(Failure kind, std::string_view operation, const std::string& detail);

    Failure kind() const noexcept { return kind_; }
    const std::string& operation() const noexcept { return operation_; }

private:
    Failure kind_;
    std::string operation_;
};

/// Caller supplied an argument outside an operation's domain.
class PreconditionError : public std::invalid_argument {
public:
    PreconditionError(std::string_view operation, const std::string& detail);

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

}  // namespace parabolica
