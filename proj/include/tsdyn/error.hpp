#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsdyn {

enum class ErrorKind {
    NonIncreasingPoints,
    TooFewPoints,
    BadFamilyParam,
    OutOfKappa,
    NonFiniteValue,
    GridMismatch,
    NotRegressive,
    ZeroDenominator,
    NotHomogeneousSolution,
    SingularWronskian,
    DegenerateRoots,
    ComplexRoots,
    ZeroBeta,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Library error. Carries the failing grid index when one is meaningful.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> index = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

}  // namespace tsdyn
