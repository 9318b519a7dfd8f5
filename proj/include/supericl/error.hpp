// Copyright 2026 The SuperICL Harness Authors.
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
#include <string_view>

namespace sicl {

enum class ErrorCode {
  // task_core
  InvalidSchema,
  MalformedRecord,
  UnknownLabel,
  MissingField,
  DuplicateId,
  KTooLarge,
  // plugin
  ConfidenceOutOfRange,
  MissingPrediction,
  BadResponse,
  // prompt
  TestBlockTooLarge,
  // llm
  InvalidRequest,
  TransportError,
  RateLimited,
  ProviderError,
  Timeout,
  RetriesExhausted,
  CacheCorrupt,
  // eval
  EmptyRecords,
  NotBinaryTask,
  MissingPluginPrediction,
  BadBinWidth,
  TooFewValues,
  // runner
  ConfigError,
  IoError,
  OutputExists,
};

/// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { Config, Data, Provider, Io };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

/// Base exception for every failure raised by the harness. The message is
/// prefixed with the error code name so logs stay greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace sicl
