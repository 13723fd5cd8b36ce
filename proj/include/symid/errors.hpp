#pragma once

#include <stdexcept>
#include <string>

namespace symid {

// Input matrices outside the manifold (non-SPD A, negative diagonal, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Inconsistent matrix/sequence sizes.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// A linear solve or decomposition that could not be carried out reliably.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Data that cannot support the requested estimate (too short, degenerate, rank deficient).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// File or format problems in the persistence layer.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symid
