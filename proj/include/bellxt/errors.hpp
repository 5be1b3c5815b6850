// Copyright 2026 The bellxt Authors
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

#ifndef BELLXT_ERRORS_HPP
#define BELLXT_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bellxt {

/// Base of every exception thrown by the library. `kind()` is a stable
/// machine-readable tag used by the CLI when reporting errors as JSON.
class Error : public std::runtime_error {
   public:
    Error(std::string kind, const std::string &message) : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string &kind() const noexcept {
        return kind_;
    }

   private:
    std::string kind_;
};

/// Bad input data or arguments. Maps to CLI exit code 2.
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// A numerical routine failed to produce a certified answer. Maps to CLI exit code 3.
class SolverError : public Error {
   public:
    using Error::Error;
};

class InvalidArgument : public ValidationError {
   public:
    explicit InvalidArgument(const std::string &message) : ValidationError("InvalidArgument", message) {}
};

class EmptySetting : public ValidationError {
   public:
    EmptySetting(int x, int y)
        : ValidationError(
              "EmptySetting",
              "no trials recorded for setting (x=" + std::to_string(x) + ", y=" + std::to_string(y) + ")"),
          x(x),
          y(y) {}
    int x;
    int y;
};

class TooFewTrials : public ValidationError {
   public:
    explicit TooFewTrials(const std::string &message) : ValidationError("TooFewTrials", message) {}
};

class OrderError : public ValidationError {
   public:
    explicit OrderError(const std::string &message) : ValidationError("OrderError", message) {}
};

class UnsupportedScenario : public ValidationError {
   public:
    explicit UnsupportedScenario(const std::string &message) : ValidationError("UnsupportedScenario", message) {}
};

/// Errors tied to a line of an input file (1-based).
class LineError : public ValidationError {
   public:
    LineError(std::string kind, int64_t line, const std::string &message)
        : ValidationError(std::move(kind), "line " + std::to_string(line) + ": " + message), line(line) {}
    int64_t line;
};

class ParseError : public LineError {
   public:
    ParseError(int64_t line, const std::string &message) : LineError("ParseError", line, message) {}
};

class RangeError : public LineError {
   public:
    RangeError(int64_t line, const std::string &message) : LineError("RangeError", line, message) {}
};

class DuplicateTrial : public ValidationError {
   public:
    DuplicateTrial(int64_t test_id, int64_t trial_index)
        : ValidationError(
              "DuplicateTrial",
              "duplicate record for test_id=" + std::to_string(test_id) +
                  " trial_index=" + std::to_string(trial_index)),
          test_id(test_id),
          trial_index(trial_index) {}
    int64_t test_id;
    int64_t trial_index;
};

class NumericalFailure : public SolverError {
   public:
    explicit NumericalFailure(const std::string &message) : SolverError("NumericalFailure", message) {}
};

class IterationLimit : public SolverError {
   public:
    explicit IterationLimit(const std::string &message) : SolverError("IterationLimit", message) {}
};

class SolverFailure : public SolverError {
   public:
    SolverFailure(std::string hypothesis, const std::string &message)
        : SolverError("SolverFailure", hypothesis + ": " + message), hypothesis(std::move(hypothesis)) {}
    std::string hypothesis;
};

}  // namespace bellxt

#endif
