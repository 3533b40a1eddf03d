// Copyright 2026 The press Authors
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

#ifndef PRESS_COMMON_HPP_
#define PRESS_COMMON_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace press {

// Position on the economic left/right axis. Used both for the annotated bias
// of a statement and for the ideological direction of a response.
enum class Direction : int8_t { Left = -1, Right = +1 };

inline int sign(Direction d) { return static_cast<int>(d); }
inline Direction opposite(Direction d) {
  return d == Direction::Left ? Direction::Right : Direction::Left;
}
inline Direction direction_from_sign(int s) {
  return s > 0 ? Direction::Right : Direction::Left;
}
std::string_view to_string(Direction d);
// Accepts "left"/"right" (any case) and "-1"/"+1"/"1".
std::optional<Direction> parse_direction(std::string_view s);

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input (CSV row, JSON document, config file).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A backend cannot do what was asked (e.g. no token log-probabilities).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace press

#endif  // PRESS_COMMON_HPP_
