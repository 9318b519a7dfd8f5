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

#include "supericl/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "supericl/error.hpp"
#include "util.hpp"

namespace sicl {

using json = nlohmann::json;

void validate_request(const CompletionRequest& request) {
  if (request.max_tokens < 1) throw Error(ErrorCode::InvalidRequest, "max_tokens must be >= 1");
  if (request.prompt.empty()) throw Error(ErrorCode::InvalidRequest, "empty prompt");
  if (!(request.temperature >= 0.0)) throw Error(ErrorCode::InvalidRequest, "negative temperature");
  for (const auto& s : request.stop_sequences) {
    if (s.empty()) throw Error(ErrorCode::InvalidRequest, "empty stop sequence");
  }
}

json request_to_json(const CompletionRequest& request) {
  return {{"model", request.model_id},
          {"prompt", request.prompt},
          {"max_tokens", request.max_tokens},
          {"temperature", request.temperature},
          {"stop", request.stop_sequences}};
}

CompletionRequest request_from_json(const json& doc) {
  CompletionRequest r;
  r.model_id = doc.at("model").get<std::string>();
  r.prompt = doc.at("prompt").get<std::string>();
  r.max_tokens = doc.at("max_tokens").get<int>();
  r.temperature = doc.at("temperature").get<double>();
  r.stop_sequences = doc.at("stop").get<std::vector<std::string>>();
  return r;
}

CacheKey CacheKey::of(const CompletionRequest& request) {
  // Temperature goes in as its shortest round-trip string so the encoding
  // does not depend on the JSON library's float printer.
  const json canonical = json::array({request.model_id, request.prompt, request.max_tokens,
                                      detail::shortest_repr(request.temperature),
                                      request.stop_sequences});
  return {detail::sha256_hex(canonical.dump())};
}

std::string apply_stop_sequences(std::string text, const std::vector<std::string>& stops) {
  std::size_t cut = std::string::npos;
  for (const auto& stop : stops) {
    if (stop.empty()) continue;
    cut = std::min(cut, text.find(stop));
  }
  if (cut != std::string::npos) text.resize(cut);
  return text;
}

CompletionResponse complete(CompletionBackend& backend, const CompletionRequest& request) {
  validate_request(request);
  auto response = backend.complete(request);
  response.text = apply_stop_sequences(std::move(response.text), request.stop_sequences);
  return response;
}

bool is_retryable(const std::exception& error) noexcept {
  const auto* e = dynamic_cast<const Error*>(&error);
  if (!e) return false;
  return e->code() == ErrorCode::TransportError || e->code() == ErrorCode::RateLimited ||
         e->code() == ErrorCode::Timeout;
}

CompletionResponse retrying_complete(CompletionBackend& backend, const CompletionRequest& request,
                                     const RetryPolicy& policy, const Sleeper& sleep) {
  if (policy.max_attempts < 1) throw Error(ErrorCode::ConfigError, "max_attempts must be >= 1");
  auto delay = policy.base_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      return complete(backend, request);
    } catch (const Error& e) {
      if (!is_retryable(e)) throw;
      if (attempt >= policy.max_attempts) {
        throw Error(ErrorCode::RetriesExhausted,
                    std::to_string(attempt) + " attempts, last error: " + e.what());
      }
    }
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    const auto next = std::chrono::duration<double, std::milli>(delay) * policy.multiplier;
    delay = std::min(policy.max_delay, std::chrono::duration_cast<std::chrono::milliseconds>(next));
  }
}

ResponseCache::ResponseCache(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create cache dir " + root_.string());
}

std::filesystem::path ResponseCache::entry_path(const CacheKey& key) const {
  return root_ / key.digest.substr(0, 2) / (key.digest + ".json");
}

std::optional<CompletionResponse> ResponseCache::lookup(const CompletionRequest& request) const {
  const auto key = CacheKey::of(request);
  const auto path = entry_path(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();

  auto corrupt = [&](const std::string& why) {
    return Error(ErrorCode::CacheCorrupt, path.string() + ": " + why);
  };
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw corrupt(e.what());
  }
  CompletionResponse out;
  try {
    if (doc.at("digest").get<std::string>() != key.digest) throw corrupt("digest mismatch");
    // The stored request must hash to the same key: guards against files
    // copied under the wrong name.
    if (CacheKey::of(request_from_json(doc.at("request"))) != key) {
      throw corrupt("request echo does not match key");
    }
    const auto& resp = doc.at("response");
    out.text = resp.at("text").get<std::string>();
    out.prompt_tokens = resp.at("prompt_tokens").get<std::size_t>();
    out.completion_tokens = resp.at("completion_tokens").get<std::size_t>();
    if (doc.at("text_sha256").get<std::string>() != detail::sha256_hex(out.text)) {
      throw corrupt("text checksum mismatch");
    }
  } catch (const json::exception& e) {
    throw corrupt(e.what());
  }
  out.from_cache = true;
  return out;
}

void ResponseCache::store(const CompletionRequest& request, const CompletionResponse& response) {
  const auto key = CacheKey::of(request);
  const auto path = entry_path(key);
  const json doc = {{"digest", key.digest},
                    {"request", request_to_json(request)},
                    {"response",
                     {{"text", response.text},
                      {"prompt_tokens", response.prompt_tokens},
                      {"completion_tokens", response.completion_tokens}}},
                    {"text_sha256", detail::sha256_hex(response.text)}};
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string());

  thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename cache entry into " + path.string());
  }
}

CompletionResponse cached_complete(ResponseCache& cache, CompletionBackend& backend,
                                   const CompletionRequest& request) {
  validate_request(request);
  if (auto hit = cache.lookup(request)) {
    cache.hits_.fetch_add(1);
    return *hit;
  }
  cache.misses_.fetch_add(1);
  auto response = complete(backend, request);
  response.from_cache = false;
  cache.store(request, response);
  return response;
}

HttpCompletionBackend::HttpCompletionBackend(std::shared_ptr<HttpTransport> transport,
                                             std::string path, const std::string& api_key_env,
                                             std::ptrdiff_t max_in_flight)
    : transport_(std::move(transport)), path_(std::move(path)), limiter_(max_in_flight) {
  if (!api_key_env.empty()) {
    if (const char* key = std::getenv(api_key_env.c_str())) api_key_ = key;
  }
}

CompletionResponse HttpCompletionBackend::complete(const CompletionRequest& request) {
  HttpHeaders headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  HttpResponse resp;
  {
    auto slot = limiter_.acquire();
    resp = transport_->post_json(path_, request_to_json(request).dump(), headers);
  }
  if (resp.status == 429) {
    throw Error(ErrorCode::RateLimited, "HTTP 429" + (resp.retry_after.empty()
                                                          ? std::string()
                                                          : " retry-after " + resp.retry_after));
  }
  if (resp.status == 408 || resp.status >= 500) {
    throw Error(ErrorCode::TransportError, "HTTP " + std::to_string(resp.status) + ": " + resp.body);
  }
  if (resp.status != 200) {
    throw Error(ErrorCode::ProviderError, "HTTP " + std::to_string(resp.status) + ": " + resp.body);
  }
  CompletionResponse out;
  try {
    const auto doc = json::parse(resp.body);
    out.text = doc.at("text").get<std::string>();
    if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
      out.prompt_tokens = usage->value("prompt_tokens", std::size_t{0});
      out.completion_tokens = usage->value("completion_tokens", std::size_t{0});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("malformed completion body: ") + e.what());
  }
  return out;
}

}  // namespace sicl
