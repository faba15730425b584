#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocksr {

// Base of all library errors. DomainError covers numerical/model conditions
// (CLI exit code 1), IoError covers file/format problems (CLI exit code 2).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public DomainError {
public:
    using DomainError::DomainError;
};

class DimensionMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

class NoConvergence : public DomainError {
public:
    using DomainError::DomainError;
};

class ZeroVector : public DomainError {
public:
    using DomainError::DomainError;
};

// Two training rows closer than the duplicate threshold; carries the pair.
class DuplicateSamples : public DomainError {
public:
    DuplicateSamples(std::size_t i, std::size_t j)
        : DomainError("duplicate samples at rows " + std::to_string(i) + " and " +
                      std::to_string(j)),
          first(i),
          second(j) {}
    std::size_t first;
    std::size_t second;
};

class DegenerateData : public DomainError {
public:
    using DomainError::DomainError;
};

class ZeroSample : public DomainError {
public:
    using DomainError::DomainError;
};

class InvalidSpectrum : public DomainError {
public:
    using DomainError::DomainError;
};

class EmptyPath : public DomainError {
public:
    using DomainError::DomainError;
};

class NumericalBreakdown : public DomainError {
public:
    NumericalBreakdown(const std::string& what, std::vector<std::size_t> active)
        : DomainError(what), active_set(std::move(active)) {}
    std::vector<std::size_t> active_set;
};

class InvalidCounts : public DomainError {
public:
    using DomainError::DomainError;
};

class InsufficientPool : public DomainError {
public:
    using DomainError::DomainError;
};

class SingleClass : public DomainError {
public:
    using DomainError::DomainError;
};

class InvalidK : public DomainError {
public:
    using DomainError::DomainError;
};

class EmptyInput : public DomainError {
public:
    using DomainError::DomainError;
};

class CsvParseError : public IoError {
public:
    CsvParseError(const std::string& what, std::size_t row, std::size_t col)
        : IoError(what + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row),
          col(col) {}
    std::size_t row;
    std::size_t col;
};

class NonBinaryLabel : public IoError {
public:
    using IoError::IoError;
};

class MalformedModelFile : public IoError {
public:
    using IoError::IoError;
};

}  // namespace ocksr
