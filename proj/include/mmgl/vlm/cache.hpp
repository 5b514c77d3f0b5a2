#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "mmgl/vlm/client.hpp"

namespace mmgl {

struct CacheEntry {
  std::string key;
  std::string response;
  std::string created_at;  // ISO-8601 UTC
};

/// Write-once response store keyed by request digest. With a directory, each
/// entry is `<dir>/<key>.json` holding {request_digest, response, created_at};
/// without one it lives in memory only. Concurrent readers, serialized writers.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& key) const;
  /// Stores `response` unless the key exists; returns the stored response
  /// either way (the first write wins).
  std::string put(const std::string& key, const std::string& response);
  std::size_t size() const;
  const std::optional<std::filesystem::path>& directory() const { return dir_; }

 private:
  std::optional<CacheEntry> load(const std::string& key) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, CacheEntry> entries_;
};

/// Consults the cache before forwarding to `inner`, then records the answer.
class CachedClient final : public VlmClient {
 public:
  CachedClient(std::shared_ptr<VlmClient> inner, std::shared_ptr<ResponseCache> cache);

  std::string complete(const PromptBundle& bundle) override;
  const ClientConfig& config() const override { return inner_->config(); }

  VlmClient& inner() { return *inner_; }
  ResponseCache& cache() { return *cache_; }

 private:
  std::shared_ptr<VlmClient> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace mmgl
