#pragma once

#include <stdexcept>
#include <string>

namespace hhlab {

/// Base of every failure raised by the library. The `kind()` string is the
/// machine-readable tag the CLI forwards in its error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& what) : Error("grid_too_coarse", what) {}
};

struct NonIntegrableSource : Error {
    explicit NonIntegrableSource(const std::string& what) : Error("non_integrable_source", what) {}
};

struct ExtrapolationError : Error {
    explicit ExtrapolationError(const std::string& what) : Error("extrapolation", what) {}
};

struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& what) : Error("quadrature_failure", what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error("no_convergence", what) {}
};

struct DegenerateBracket : Error {
    explicit DegenerateBracket(const std::string& what) : Error("degenerate_bracket", what) {}
};

struct IntegratorFailure : Error {
    explicit IntegratorFailure(const std::string& what) : Error("integrator_failure", what) {}
};

struct ZeroField : Error {
    explicit ZeroField(const std::string& what) : Error("zero_field", what) {}
};

}  // namespace hhlab
