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

#include "supericl/error.hpp"

namespace sicl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::BadResponse: return "BadResponse";
    case ErrorCode::TestBlockTooLarge: return "TestBlockTooLarge";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::EmptyRecords: return "EmptyRecords";
    case ErrorCode::NotBinaryTask: return "NotBinaryTask";
    case ErrorCode::MissingPluginPrediction: return "MissingPluginPrediction";
    case ErrorCode::BadBinWidth: return "BadBinWidth";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSchema:
    case ErrorCode::KTooLarge:
    case ErrorCode::ConfigError:
    case ErrorCode::BadBinWidth:
      return ErrorCategory::Config;
    case ErrorCode::BadResponse:
    case ErrorCode::InvalidRequest:
    case ErrorCode::TransportError:
    case ErrorCode::RateLimited:
    case ErrorCode::ProviderError:
    case ErrorCode::Timeout:
    case ErrorCode::RetriesExhausted:
      return ErrorCategory::Provider;
    case ErrorCode::IoError:
    case ErrorCode::OutputExists:
    case ErrorCode::CacheCorrupt:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace sicl
