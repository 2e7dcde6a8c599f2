#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>

#include "actdiag/errors.hpp"

namespace actdiag::detail {

struct ParsedUrl {
  std::string origin;  ///< scheme://host[:port]
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw PreconditionError("invalid URL (no scheme): " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::unique_ptr<httplib::Client> make_client(const std::string& origin, int timeout_seconds) {
  auto client = std::make_unique<httplib::Client>(origin);
  client->set_connection_timeout(timeout_seconds, 0);
  client->set_read_timeout(timeout_seconds, 0);
  client->set_write_timeout(timeout_seconds, 0);
  return client;
}

inline httplib::Headers auth_headers(const std::string& env_name) {
  httplib::Headers headers;
  if (env_name.empty()) return headers;
  if (const char* token = std::getenv(env_name.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  return headers;
}

inline bool retriable_status(int status) {
  return status == 408 || status == 409 || status == 429 || status >= 500;
}

}  // namespace actdiag::detail
