// Copyright 2026 The CADD Authors.
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

#ifndef CADD_COMMON_ERROR_H_
#define CADD_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace cadd {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, violated preconditions, inconsistent ids.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Something outside the process is missing or failed: codec binaries,
// noise assets, network providers. The CLI maps these to exit code 3.
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

// Transport-level provider failure. Distinct from "subject not found",
// which is not an error and yields empty context.
class ProviderError : public EnvironmentError {
 public:
  ProviderError(const std::string& what, bool retriable)
      : EnvironmentError(what), retriable_(retriable) {}
  bool retriable() const { return retriable_; }

 private:
  bool retriable_;
};

// Training diverged (NaN/inf loss) or otherwise cannot continue.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace cadd

#endif  // CADD_COMMON_ERROR_H_
