#include "astres/util/http.hpp"

#include <cstdlib>
#include <thread>

#include "astres/error.hpp"
#include "httplib.h"

namespace astres::util {

namespace {

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string &url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw EndpointError("not an absolute URL: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos)
    return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

} // namespace

nlohmann::json post_json(const std::string &url, const nlohmann::json &body, const HttpOptions &opts) {
  SplitUrl u = split_url(url);
  httplib::Headers headers;
  if (!opts.bearer_env.empty()) {
    if (const char *token = std::getenv(opts.bearer_env.c_str()); token && *token)
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const std::string payload = body.dump();
  auto backoff = opts.backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client cli(u.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    auto res = cli.Post(u.path, headers, payload, "application/json");
    if (!res) {
      last_error = url + ": " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = url + ": HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw EndpointError(url + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error &e) {
      throw EndpointError(url + ": reply is not JSON: " + e.what());
    }
  }
  throw EndpointError(last_error + " (after " + std::to_string(opts.retries + 1) + " attempts)");
}

} // namespace astres::util
