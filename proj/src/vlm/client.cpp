#include "mmgl/vlm/client.hpp"

#include "json.hpp"

#include "mmgl/error.hpp"
#include "mmgl/vlm/digest.hpp"

namespace mmgl {

void ClientConfig::validate() const {
  if (concurrency_limit < 1) throw Error(Errc::InvalidArgument, "concurrency_limit must be at least 1");
  if (model_name.empty()) throw Error(Errc::InvalidArgument, "model_name is empty");
  if (timeout.count() <= 0) throw Error(Errc::InvalidArgument, "timeout must be positive");
  if (backoff_base.count() < 0) throw Error(Errc::InvalidArgument, "backoff_base must be non-negative");
}

std::string canonical_request(const ClientConfig& cfg, const PromptBundle& bundle) {
  bundle.validate();
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : bundle.segments) {
    if (const auto* t = std::get_if<TextSegment>(&s)) {
      segments.push_back({{"text", t->text}});
    } else {
      segments.push_back({{"image_sha256", sha256_hex(read_image_bytes(std::get<ImageSegment>(s).path))}});
    }
  }
  const nlohmann::json j = {
      {"model", cfg.model_name},
      {"temperature", cfg.temperature},
      {"max_tokens", cfg.max_tokens},
      {"system", bundle.system ? nlohmann::json(*bundle.system) : nlohmann::json(nullptr)},
      {"segments", std::move(segments)},
  };
  return j.dump();
}

std::string cache_key(const ClientConfig& cfg, const PromptBundle& bundle) {
  return sha256_hex(canonical_request(cfg, bundle));
}

MockClient::MockClient(std::map<std::string, std::string> rules, std::string fallback, ClientConfig cfg)
    : rules_(std::move(rules)), fallback_(std::move(fallback)), cfg_(std::move(cfg)) {}

void MockClient::set_responder(Responder responder) {
  std::lock_guard lock(mutex_);
  responder_ = std::move(responder);
}

std::string MockClient::complete(const PromptBundle& bundle) {
  std::string key = cache_key(cfg_, bundle);
  std::string response;
  if (const auto it = rules_.find(key); it != rules_.end()) {
    response = it->second;
  } else {
    std::optional<std::string> answered;
    Responder responder;
    {
      std::lock_guard lock(mutex_);
      responder = responder_;
    }
    if (responder) answered = responder(bundle);
    response = answered ? *answered : fallback_;
  }
  std::lock_guard lock(mutex_);
  calls_.push_back({std::move(key), bundle});
  return response;
}

std::vector<MockClient::Call> MockClient::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t MockClient::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

}  // namespace mmgl
