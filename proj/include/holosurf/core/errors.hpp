#pragma once

#include <stdexcept>
#include <string>

namespace holosurf {

/// Invalid input or a violated precondition. `code()` is the stable, machine-readable error name
/// (DegenerateSimplex, NotACycle, ...); the CLI maps this family to exit code 1.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A state that should be unreachable for valid inputs (LP infeasible on a cycle, unmatched edge
/// after a successful cycle check). Exit code 2 in the CLI.
class InternalError : public std::runtime_error {
public:
    InternalError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace holosurf
