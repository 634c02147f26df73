// Copyright 2026 The gridsec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridsec {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Truncated or otherwise undecodable byte strings.
class DecodeError : public Error {
 public:
  using Error::Error;
};

class MalformedCiphertext : public Error {
 public:
  using Error::Error;
};

// Two Paillier values that do not live under the same modulus.
class ModulusMismatch : public Error {
 public:
  using Error::Error;
};

// Group elements from different pairing backends (or contexts).
class BackendMismatch : public Error {
 public:
  using Error::Error;
};

// Authenticated payload failed its tag check.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class PolicySyntaxError : public Error {
 public:
  PolicySyntaxError(const std::string& what, std::size_t offset)
      : Error("policy syntax error at offset " + std::to_string(offset) +
              ": " + what),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Scenario validation failure. `path` names the offending field, e.g.
// "records[2].policy".
class ValidationError : public Error {
 public:
  ValidationError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace gridsec
