// Copyright 2026 The Orion Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ORION_ERRORS_H_
#define ORION_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orion {

// Base of every error the engine raises. Per-case failures inside a campaign
// are caught and recorded; only initialization errors escape run_campaign.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalKindForType : public Error {
 public:
  using Error::Error;
};

// A rule was asked to mutate parameters outside its applicability.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownApi : public Error {
 public:
  explicit UnknownApi(const std::string& api) : Error("unknown api: " + api) {}
};

class AnnotationMissing : public Error {
 public:
  using Error::Error;
};

class UnrenderableParam : public Error {
 public:
  using Error::Error;
};

class IncomparableOutputs : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// The execution backend cannot start or spawn cases.
class InfraError : public Error {
 public:
  using Error::Error;
};

class UnknownCase : public Error {
 public:
  explicit UnknownCase(const std::string& id) : Error("unknown case: " + id) {}
};

}  // namespace orion

#endif  // ORION_ERRORS_H_
