/*
 * Copyright 2026 The privdistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVDISTILL_TRANSPORT_H_
#define PRIVDISTILL_TRANSPORT_H_

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace privdistill {

struct HttpRequest {
  std::string url;  // absolute, e.g. http://localhost:8080/v1/chat/completions
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Raised by transports when no HTTP response was obtained at all
// (connection refused, timeout, DNS failure).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON-over-HTTP POST. Implementations must be safe to call concurrently.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse Post(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport. https URLs need OpenSSL at build time.
class HttplibTransport : public Transport {
 public:
  explicit HttplibTransport(
      std::chrono::seconds timeout = std::chrono::seconds(120))
      : timeout_(timeout) {}
  HttpResponse Post(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

struct ParsedUrl {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1/chat" ("/" when absent)
};

// Throws TransportError on URLs without an http(s) scheme.
ParsedUrl SplitUrl(const std::string& url);

}  // namespace privdistill

#endif  // PRIVDISTILL_TRANSPORT_H_
