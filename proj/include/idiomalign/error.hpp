// Copyright 2026 The idiomalign Authors.
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

#ifndef IDIOMALIGN_ERROR_HPP_
#define IDIOMALIGN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace idiomalign {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// Bytes or text could not be decoded into the expected structure.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Configuration or persisted artifact does not match what the caller expects.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A remote call failed in a way that may succeed when repeated.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts = 1)
      : Error(what), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

}  // namespace idiomalign

#endif  // IDIOMALIGN_ERROR_HPP_
