#pragma once

#include <stdexcept>
#include <string>

namespace qm {

// Caller passed something the contract rejects.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A mathematical invariant failed on data that should satisfy it.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// A construction that is supposed to always succeed did not; indicates a bug.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

class SpectralError : public std::runtime_error {
public:
    explicit SpectralError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qm
