#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <semaphore>
#include <string>

#include "mmgl/vlm/client.hpp"

namespace mmgl {

/// Environment variable holding the bearer token for the endpoint.
inline constexpr const char* kApiTokenEnv = "MMGL_API_TOKEN";

struct HttpRequest {
  std::string url;
  std::string body;
  std::map<std::string, std::string> headers;
  std::chrono::milliseconds timeout{0};
};

struct HttpResponse {
  int status = 0;  // 0 when no response arrived
  std::string body;
  bool timed_out = false;
  std::string error;  // transport-level failure description
};

/// One POST round trip. Swappable so tests can stand in for the endpoint.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib transport (http and https).
std::unique_ptr<Transport> make_http_transport();

/// Chat-completion request body for `bundle` (images inlined as base64 data URLs).
std::string build_wire_request(const ClientConfig& cfg, const PromptBundle& bundle);
/// Assistant text from choices[0].message.content; throws MalformedResponse.
std::string parse_wire_response(const std::string& body);

/// Endpoint client with bounded retry and a cap on in-flight requests.
/// 429, 5xx, timeouts and connection failures are retried; the wait before
/// retry i (0-based) is backoff_base·2^i. Exhaustion raises RateLimited,
/// Timeout or HttpError according to the last failure.
class HttpClient final : public VlmClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpClient(ClientConfig cfg, std::unique_ptr<Transport> transport = nullptr, Sleeper sleeper = nullptr);

  std::string complete(const PromptBundle& bundle) override;
  const ClientConfig& config() const override { return cfg_; }

 private:
  ClientConfig cfg_;
  std::unique_ptr<Transport> transport_;
  Sleeper sleeper_;
  std::counting_semaphore<> slots_;
  std::string token_;
};

}  // namespace mmgl
