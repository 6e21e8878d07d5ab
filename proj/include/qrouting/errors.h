// Copyright 2026 The qrouting Authors
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

#ifndef QROUTING_ERRORS_H_
#define QROUTING_ERRORS_H_

#include <stdexcept>
#include <string>

namespace qrouting {

// Raised when an argument violates an operation's precondition (non-finite
// angles, wrong unitary count, negative latency coefficients, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The routing fractions send flow around a cycle with loop gain 1, so the
// conservation system has no finite solution.
class LoopDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Price of anarchy requested for a network whose optimal cost is zero.
class UndefinedRatioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Text input that does not follow the config or network grammar. The line
// number is 1-based; 0 means the error is not tied to a single line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                          message
                                    : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// A result file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrouting

#endif  // QROUTING_ERRORS_H_
