// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace creascore {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition was violated (wrong dimension, empty list, bad range).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Input is structurally valid but numerically degenerate (zero vector, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// A dataset or config file violates its schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Cross-record referential integrity violation.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Remote endpoint rejected the credentials (HTTP 401/403).
class AuthError : public Error {
public:
    using Error::Error;
};

// Remote endpoint unreachable or persistently failing after retries.
class TransportError : public Error {
public:
    using Error::Error;
};

// Remote endpoint answered with a malformed or inconsistent payload.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// The embedding cache file has an unreadable or inconsistent line.
class CacheCorruptionError : public Error {
public:
    CacheCorruptionError(std::size_t line, const std::string& what)
        : Error("cache line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// The exhaustive oracle was asked for a problem size it cannot enumerate.
class OracleScopeError : public Error {
public:
    using Error::Error;
};

}  // namespace creascore
