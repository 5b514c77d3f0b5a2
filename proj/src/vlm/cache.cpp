#include "mmgl/vlm/cache.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(*dir_);
}

std::optional<CacheEntry> ResponseCache::load(const std::string& key) const {
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(ss.str());
    return CacheEntry{j.at("request_digest").get<std::string>(), j.at("response").get<std::string>(),
                      j.value("created_at", std::string())};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedFile, path.string() + ": " + e.what());
  }
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  if (!valid_key(key)) throw Error(Errc::InvalidArgument, "cache key must be lowercase hex");
  {
    std::shared_lock lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second.response;
  }
  std::unique_lock lock(mutex_);
  if (const auto it = entries_.find(key); it != entries_.end()) return it->second.response;
  auto entry = load(key);
  if (!entry) return std::nullopt;
  const std::string response = entry->response;
  entries_.emplace(key, std::move(*entry));
  return response;
}

std::string ResponseCache::put(const std::string& key, const std::string& response) {
  if (!valid_key(key)) throw Error(Errc::InvalidArgument, "cache key must be lowercase hex");
  std::unique_lock lock(mutex_);
  if (const auto it = entries_.find(key); it != entries_.end()) return it->second.response;
  if (auto existing = load(key)) {
    const std::string stored = existing->response;
    entries_.emplace(key, std::move(*existing));
    return stored;
  }
  CacheEntry entry{key, response, utc_now()};
  if (dir_) {
    const auto final_path = *dir_ / (key + ".json");
    const auto tmp = *dir_ / (key + ".json.tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
      out << nlohmann::json{{"request_digest", key}, {"response", response}, {"created_at", entry.created_at}}.dump(2)
          << '\n';
    }
    std::filesystem::rename(tmp, final_path);
  }
  entries_.emplace(key, std::move(entry));
  return response;
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  if (!dir_) return entries_.size();
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(*dir_))
    if (e.path().extension() == ".json") ++n;
  return n;
}

CachedClient::CachedClient(std::shared_ptr<VlmClient> inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
  if (!inner_ || !cache_) throw Error(Errc::InvalidArgument, "cached client needs a client and a cache");
}

std::string CachedClient::complete(const PromptBundle& bundle) {
  const std::string key = cache_key(inner_->config(), bundle);
  if (auto hit = cache_->get(key)) return *hit;
  return cache_->put(key, inner_->complete(bundle));
}

}  // namespace mmgl
