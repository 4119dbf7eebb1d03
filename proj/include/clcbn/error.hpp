// Copyright 2026 The clcbn Authors
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

#ifndef CLCBN_ERROR_HPP_
#define CLCBN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace clcbn {

// Values mirror clcbn_status in clcbn.h.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kMalformedLine = 3,
  kDuplicateVerseId = 4,
  kBadFormat = 5,
  kUnsupportedVersion = 6,
  kTruncated = 7,
  kDimensionMismatch = 8,
  kNonFiniteLoss = 9,
  kEmptyInput = 10,
  kNotInjective = 11,
  kInternal = 99,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clcbn

#endif  // CLCBN_ERROR_HPP_
