// Copyright 2026 The wjdot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WJDOT_ERROR_HPP_
#define WJDOT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace wjdot {

/// Invalid argument: shape mismatch, non-finite value, weights off the simplex.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents. The message carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal bookkeeping; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Optimization produced a non-finite objective.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) +
                           ")"),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

}  // namespace wjdot

#endif  // WJDOT_ERROR_HPP_
