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

// The black-box completion model: request/response types, the backend
// interface, a content-addressed response cache and a retry decorator.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supericl/http.hpp"

namespace sicl {

struct CompletionRequest {
  std::string model_id;
  std::string prompt;
  int max_tokens = 16;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences;

  bool operator==(const CompletionRequest&) const = default;
};

struct CompletionResponse {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  bool from_cache = false;
};

/// Throws InvalidRequest when max_tokens < 1, the prompt is empty, the
/// temperature is negative or a stop sequence is empty.
void validate_request(const CompletionRequest& request);

nlohmann::json request_to_json(const CompletionRequest& request);
CompletionRequest request_from_json(const nlohmann::json& doc);

/// SHA-256 over a canonical JSON encoding of every request field.
struct CacheKey {
  std::string digest;

  static CacheKey of(const CompletionRequest& request);
  bool operator==(const CacheKey&) const = default;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  /// Raw model output; stop sequences are applied by complete().
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

/// Truncates at the earliest occurrence of any stop sequence.
std::string apply_stop_sequences(std::string text, const std::vector<std::string>& stops);

/// Validates, delegates and applies stop sequences.
CompletionResponse complete(CompletionBackend& backend, const CompletionRequest& request);

/// True for TransportError, RateLimited and Timeout.
bool is_retryable(const std::exception& error) noexcept;

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Retries retryable failures with exponential backoff (base_delay,
/// base_delay*multiplier, ...). Non-retryable errors propagate after one
/// call; a retryable failure on the last attempt becomes RetriesExhausted.
CompletionResponse retrying_complete(CompletionBackend& backend, const CompletionRequest& request,
                                     const RetryPolicy& policy, const Sleeper& sleep = {});

class RetryingBackend final : public CompletionBackend {
 public:
  RetryingBackend(std::shared_ptr<CompletionBackend> inner, RetryPolicy policy, Sleeper sleep = {})
      : inner_(std::move(inner)), policy_(policy), sleep_(std::move(sleep)) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    return retrying_complete(*inner_, request, policy_, sleep_);
  }

 private:
  std::shared_ptr<CompletionBackend> inner_;
  RetryPolicy policy_;
  Sleeper sleep_;
};

/// Counts invocations of the wrapped backend.
class CountingBackend final : public CompletionBackend {
 public:
  explicit CountingBackend(std::shared_ptr<CompletionBackend> inner) : inner_(std::move(inner)) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->complete(request);
  }
  std::size_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<CompletionBackend> inner_;
  std::atomic<std::size_t> calls_{0};
};

/// One JSON file per request digest under `root/<first two hex>/`, holding
/// the request echo, the response and a SHA-256 of the response text.
/// Writes go to a unique temporary name and are renamed into place, so
/// concurrent writers never expose a partial file.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  /// Throws CacheCorrupt if the entry exists but fails its integrity check.
  std::optional<CompletionResponse> lookup(const CompletionRequest& request) const;
  void store(const CompletionRequest& request, const CompletionResponse& response);

  std::filesystem::path entry_path(const CacheKey& key) const;
  const std::filesystem::path& root() const { return root_; }

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  friend CompletionResponse cached_complete(ResponseCache&, CompletionBackend&,
                                            const CompletionRequest&);
  std::filesystem::path root_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

/// Serves identical requests from the cache with from_cache=true; otherwise
/// calls complete() and persists the result.
CompletionResponse cached_complete(ResponseCache& cache, CompletionBackend& backend,
                                   const CompletionRequest& request);

/// Text-completion provider over HTTP:
///   POST {"model","prompt","max_tokens","temperature","stop"}
///   -> {"text", "usage": {"prompt_tokens", "completion_tokens"}}
/// 429 maps to RateLimited, 408 and 5xx to TransportError, any other
/// non-200 to ProviderError. The bearer token is read from the named
/// environment variable at construction; it is never stored in config.
class HttpCompletionBackend final : public CompletionBackend {
 public:
  HttpCompletionBackend(std::shared_ptr<HttpTransport> transport, std::string path,
                        const std::string& api_key_env, std::ptrdiff_t max_in_flight = 4);

  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string path_;
  std::string api_key_;
  InFlightLimiter limiter_;
};

}  // namespace sicl
