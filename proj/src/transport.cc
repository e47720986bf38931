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

#include "privdistill/transport.h"

#include "httplib.h"

namespace privdistill {

ParsedUrl SplitUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("URL lacks a scheme: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw TransportError("unsupported URL scheme: " + scheme);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  if (path_start == std::string::npos) {
    parsed.scheme_host_port = url;
    parsed.path = "/";
  } else {
    parsed.scheme_host_port = url.substr(0, path_start);
    parsed.path = url.substr(path_start);
  }
  return parsed;
}

HttpResponse HttplibTransport::Post(const HttpRequest& request) {
  const ParsedUrl url = SplitUrl(request.url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.scheme_host_port.rfind("https://", 0) == 0) {
    throw TransportError("https endpoints require a build with OpenSSL");
  }
#endif
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  for (const auto& [name, value] : request.headers) headers.emplace(name, value);
  auto result = client.Post(url.path, headers, request.body, "application/json");
  if (!result) {
    throw TransportError("POST " + request.url + " failed: " +
                         httplib::to_string(result.error()));
  }
  return HttpResponse{result->status, result->body};
}

}  // namespace privdistill
