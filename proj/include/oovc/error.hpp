// Copyright 2026 The oovc Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace oovc {

enum class ErrorKind {
  kInvalidConfig,
  kInvalidInput,
  kFormat,
  kFile,
  kTraining,
  kContainer,
  kStratification,
  kUsage,
};

const char* to_string(ErrorKind kind);

// All library failures derive from Error so callers can map a kind to an
// exit code without catching a zoo of types.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define OOVC_DEFINE_ERROR(Name, Kind)                                    \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

OOVC_DEFINE_ERROR(InvalidConfigError, kInvalidConfig)
OOVC_DEFINE_ERROR(InvalidInputError, kInvalidInput)
OOVC_DEFINE_ERROR(FormatError, kFormat)
OOVC_DEFINE_ERROR(FileError, kFile)
OOVC_DEFINE_ERROR(TrainingError, kTraining)
OOVC_DEFINE_ERROR(ContainerError, kContainer)
OOVC_DEFINE_ERROR(StratificationError, kStratification)
OOVC_DEFINE_ERROR(UsageError, kUsage)

#undef OOVC_DEFINE_ERROR

}  // namespace oovc
