#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mmgl/vlm/prompt.hpp"

namespace mmgl {

struct ClientConfig {
  std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model_name = "mock";
  std::chrono::milliseconds timeout{60000};
  unsigned max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  double temperature = 0.0;
  unsigned max_tokens = 256;
  unsigned concurrency_limit = 4;

  void validate() const;
};

/// Canonical request description hashed into the cache key: model, sampling
/// parameters, system text, and segments with images reduced to a SHA-256 of
/// their bytes (so moved files still hit). Throws ImageUnreadable.
std::string canonical_request(const ClientConfig& cfg, const PromptBundle& bundle);
/// Hex SHA-256 of canonical_request().
std::string cache_key(const ClientConfig& cfg, const PromptBundle& bundle);

/// A chat-completion endpoint. Implementations are safe to call from several
/// threads at once.
class VlmClient {
 public:
  virtual ~VlmClient() = default;
  /// Assistant text for `bundle`, verbatim.
  virtual std::string complete(const PromptBundle& bundle) = 0;
  virtual const ClientConfig& config() const = 0;
};

/// Deterministic test double: returns rules[cache_key] (or the responder's
/// answer, or the default) and logs every call. Never touches the network.
class MockClient final : public VlmClient {
 public:
  using Responder = std::function<std::optional<std::string>(const PromptBundle&)>;

  struct Call {
    std::string key;
    PromptBundle bundle;
  };

  MockClient(std::map<std::string, std::string> rules, std::string fallback, ClientConfig cfg = {});

  /// Consulted after the rule map; an empty optional falls through to the default.
  void set_responder(Responder responder);

  std::string complete(const PromptBundle& bundle) override;
  const ClientConfig& config() const override { return cfg_; }

  std::vector<Call> calls() const;
  std::size_t call_count() const;

 private:
  std::map<std::string, std::string> rules_;
  std::string fallback_;
  ClientConfig cfg_;
  Responder responder_;
  mutable std::mutex mutex_;
  std::vector<Call> calls_;
};

}  // namespace mmgl
