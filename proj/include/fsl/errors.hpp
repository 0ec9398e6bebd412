#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A panel or matrix contains a NaN or infinity.
class NonFiniteError : public Error {
public:
    NonFiniteError(std::ptrdiff_t t, std::ptrdiff_t i, std::ptrdiff_t j = -1)
        : Error("non-finite value at (t=" + std::to_string(t) + ", i=" + std::to_string(i) +
                (j >= 0 ? ", j=" + std::to_string(j) : std::string{}) + ")"),
          t(t), i(i), j(j) {}
    std::ptrdiff_t t, i, j;
};

class DimensionTooSmallError : public Error {
public:
    explicit DimensionTooSmallError(const std::string& what) : Error(what) {}
};

/// Loading column with zero norm; its strength is undefined.
class ZeroColumnError : public Error {
public:
    explicit ZeroColumnError(std::ptrdiff_t column)
        : Error("loading column " + std::to_string(column) + " has zero norm"), column(column) {}
    std::ptrdiff_t column;
};

/// log(d) = 0 at d = 1: strengths are undefined.
class DegenerateDimError : public Error {
public:
    explicit DegenerateDimError(const std::string& what) : Error(what) {}
};

class UnstableArError : public Error {
public:
    explicit UnstableArError(double coefficient)
        : Error("AR coefficient " + std::to_string(coefficient) + " is not stationary (|phi| >= 1)"),
          coefficient(coefficient) {}
    double coefficient;
};

class DimMismatchError : public Error {
public:
    explicit DimMismatchError(const std::string& what) : Error(what) {}
};

class NonPositiveDiagonalError : public Error {
public:
    explicit NonPositiveDiagonalError(std::ptrdiff_t factor, double value)
        : Error("projected second-moment diagonal entry " + std::to_string(factor) +
                " is non-positive (" + std::to_string(value) + ")"),
          factor(factor), value(value) {}
    std::ptrdiff_t factor;  // 0-based factor index
    double value;
};

class NonPositiveTraceError : public Error {
public:
    explicit NonPositiveTraceError(const std::string& what) : Error(what) {}
};

class NonPositiveError : public Error {
public:
    explicit NonPositiveError(const std::string& what) : Error(what) {}
};

class ShapeMismatchError : public Error {
public:
    explicit ShapeMismatchError(const std::string& what) : Error(what) {}
};

/// Malformed input file (panels, configs, tables).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class InvalidSpecError : public Error {
public:
    explicit InvalidSpecError(const std::string& what) : Error(what) {}
};

}  // namespace fsl
