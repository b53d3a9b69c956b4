// Copyright 2026 The PPPR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pppr {

// Exception hierarchy. Each leaf maps onto one exit-code class in the CLI:
// data/validation problems, configuration problems, and backend/transport
// problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit code 1.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

class LinkError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class PairingError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public DataError {
 public:
  using DataError::DataError;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : NumericError("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

// Caller broke a documented precondition.
class ContractViolation : public DataError {
 public:
  using DataError::DataError;
};

// Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Exit code 3.
class BackendError : public Error {
 public:
  using Error::Error;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace pppr
