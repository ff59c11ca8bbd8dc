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

#include "oovc/error.hpp"

namespace oovc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kFile: return "file";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kContainer: return "container";
    case ErrorKind::kStratification: return "stratification";
    case ErrorKind::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace oovc
