#pragma once

#include <stdexcept>
#include <string>

namespace levygs {

// All failures surface as typed exceptions so the CLI can map them to
// distinct exit codes (validation vs numerical).

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct BracketInvalid : NumericalError {
    explicit BracketInvalid(const std::string& what) : NumericalError(what) {}
};

struct NoConvergence : NumericalError {
    explicit NoConvergence(const std::string& what) : NumericalError(what) {}
};

struct RootIsolationFailure : NumericalError {
    explicit RootIsolationFailure(const std::string& what) : NumericalError(what) {}
};

struct DomainError : NumericalError {
    explicit DomainError(const std::string& what) : NumericalError(what) {}
};

struct DenominatorNonPositive : NumericalError {
    explicit DenominatorNonPositive(const std::string& what) : NumericalError(what) {}
};

struct NumericalInstability : NumericalError {
    explicit NumericalInstability(const std::string& what) : NumericalError(what) {}
};

struct HorizonTooShort : NumericalError {
    explicit HorizonTooShort(const std::string& what) : NumericalError(what) {}
};

struct DiscretizationUnstable : NumericalError {
    explicit DiscretizationUnstable(const std::string& what) : NumericalError(what) {}
};

} // namespace levygs
