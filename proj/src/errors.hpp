// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace gasrec {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Caller passed invalid arguments or violated a documented precondition.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

// Input data breaks a domain invariant (height gaps, inconsistent prices, ...).
class DataError : public Error {
  public:
    using Error::Error;
};

// Malformed file content; the message carries the line number where known.
class ParseError : public DataError {
  public:
    using DataError::DataError;
};

// RPC endpoint unreachable or returned a protocol-level failure.
class TransportError : public Error {
  public:
    using Error::Error;
};

// Training aborted, e.g. on non-finite gradients.
class TrainError : public Error {
  public:
    using Error::Error;
};

// File reading/writing failures, including model and dataset files.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace gasrec
