#pragma once

#include <chrono>
#include <string>

#include "json.hpp"

namespace astres::util {

struct HttpOptions {
  std::chrono::milliseconds timeout{60000};
  int retries = 2;                              // attempts after the first
  std::chrono::milliseconds backoff{500};       // doubled after each failure
  std::string bearer_env;                       // environment variable holding a token
};

/// POSTs `body` to an http(s) URL and parses the JSON reply. Transport
/// errors, 429 and 5xx responses are retried; everything else throws
/// EndpointError at once.
nlohmann::json post_json(const std::string &url, const nlohmann::json &body, const HttpOptions &opts);

} // namespace astres::util
