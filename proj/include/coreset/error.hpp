// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace coreset {

/// Bad input data or configuration. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure that should not happen on validated input. Maps to exit code 2.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw ValidationError(what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
}

} // namespace detail
} // namespace coreset
