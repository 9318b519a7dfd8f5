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

#include "supericl/http.hpp"

#ifdef SUPERICL_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "supericl/error.hpp"

namespace sicl {

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::ConfigError, "URL without scheme: " + std::string(url));
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::ConfigError, "unsupported URL scheme: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

HttplibTransport::HttplibTransport(std::string origin, std::chrono::milliseconds timeout)
    : origin_(std::move(origin)), timeout_(timeout) {
#ifndef SUPERICL_WITH_OPENSSL
  if (origin_.rfind("https://", 0) == 0) {
    throw Error(ErrorCode::ConfigError, "built without TLS support: " + origin_);
  }
#endif
}

HttpResponse HttplibTransport::post_json(const std::string& path, const std::string& body,
                                         const HttpHeaders& headers) {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto result = client.Post(path, hdrs, body, "application/json");
  if (!result) {
    const auto err = result.error();
    const auto what = origin_ + path + ": " + httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::Timeout, what);
    }
    throw Error(ErrorCode::TransportError, what);
  }
  HttpResponse out{result->status, result->body, {}};
  if (result->has_header("Retry-After")) out.retry_after = result->get_header_value("Retry-After");
  return out;
}

}  // namespace sicl
