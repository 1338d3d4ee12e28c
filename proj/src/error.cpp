#include "tsdyn/error.hpp"

namespace tsdyn {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonIncreasingPoints: return "NonIncreasingPoints";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::BadFamilyParam: return "BadFamilyParam";
        case ErrorKind::OutOfKappa: return "OutOfKappa";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NotRegressive: return "NotRegressive";
        case ErrorKind::ZeroDenominator: return "ZeroDenominator";
        case ErrorKind::NotHomogeneousSolution: return "NotHomogeneousSolution";
        case ErrorKind::SingularWronskian: return "SingularWronskian";
        case ErrorKind::DegenerateRoots: return "DegenerateRoots";
        case ErrorKind::ComplexRoots: return "ComplexRoots";
        case ErrorKind::ZeroBeta: return "ZeroBeta";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      index_(index) {}

}  // namespace tsdyn
