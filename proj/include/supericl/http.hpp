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

// Minimal JSON-over-HTTP transport shared by the remote classifier and the
// completion provider. Tests substitute a recording stub.

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

namespace sicl {

using HttpHeaders = std::map<std::string, std::string>;

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string retry_after;  // raw Retry-After header, if any
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;

  /// POSTs a JSON body to `path` relative to the transport's origin.
  /// Connection failures throw Error(TransportError); read/connect timeouts
  /// throw Error(Timeout). Any HTTP status is returned, not thrown.
  virtual HttpResponse post_json(const std::string& path, const std::string& body,
                                 const HttpHeaders& headers) = 0;
};

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/', may be just "/"
};

/// Throws Error(ConfigError) for anything that is not http:// or https://.
SplitUrl split_url(std::string_view url);

/// cpp-httplib backed transport. A fresh client is used per request so
/// concurrent callers never share a socket.
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::string origin,
                            std::chrono::milliseconds timeout = std::chrono::seconds(60));

  HttpResponse post_json(const std::string& path, const std::string& body,
                         const HttpHeaders& headers) override;

 private:
  std::string origin_;
  std::chrono::milliseconds timeout_;
};

/// Caps the number of requests in flight across threads.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::ptrdiff_t limit) : slots_(limit < 1 ? 1 : limit) {}

  class Slot {
   public:
    explicit Slot(InFlightLimiter& owner) : owner_(owner) { owner_.slots_.acquire(); }
    ~Slot() { owner_.slots_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InFlightLimiter& owner_;
  };

  Slot acquire() { return Slot(*this); }

 private:
  std::counting_semaphore<1024> slots_;
};

}  // namespace sicl
