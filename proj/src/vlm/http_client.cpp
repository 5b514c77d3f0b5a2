#include "mmgl/vlm/http_client.hpp"

#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "mmgl/error.hpp"
#include "mmgl/vlm/digest.hpp"

namespace mmgl {
namespace {

std::string mime_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const auto scheme_end = request.url.find("://");
    if (scheme_end == std::string::npos) throw Error(Errc::InvalidArgument, "endpoint must be an absolute URL");
    const auto path_begin = request.url.find('/', scheme_end + 3);
    const std::string base = request.url.substr(0, path_begin);
    const std::string path = path_begin == std::string::npos ? "/" : request.url.substr(path_begin);

    httplib::Client client(base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers(request.headers.begin(), request.headers.end());
    auto result = client.Post(path, headers, request.body, "application/json");
    HttpResponse out;
    if (!result) {
      const auto err = result.error();
      out.timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                      err == httplib::Error::ConnectionTimeout;
      out.error = httplib::to_string(err);
      return out;
    }
    out.status = result->status;
    out.body = result->body;
    return out;
  }
};

enum class Failure { none, rate_limited, timeout, server, connection };

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttplibTransport>(); }

std::string build_wire_request(const ClientConfig& cfg, const PromptBundle& bundle) {
  bundle.validate();
  using nlohmann::json;
  json messages = json::array();
  if (bundle.system)
    messages.push_back({{"role", "system"}, {"content", json::array({{{"type", "text"}, {"text", *bundle.system}}})}});
  json content = json::array();
  for (const auto& s : bundle.segments) {
    if (const auto* t = std::get_if<TextSegment>(&s)) {
      content.push_back({{"type", "text"}, {"text", t->text}});
    } else {
      const auto& path = std::get<ImageSegment>(s).path;
      const std::string url = "data:" + mime_for(path) + ";base64," + base64_encode(read_image_bytes(path));
      content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
  }
  messages.push_back({{"role", "user"}, {"content", std::move(content)}});
  return json{{"model", cfg.model_name},
              {"temperature", cfg.temperature},
              {"max_tokens", cfg.max_tokens},
              {"messages", std::move(messages)}}
      .dump();
}

std::string parse_wire_response(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(Errc::MalformedResponse, "message content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedResponse, std::string("unexpected completion payload: ") + e.what());
  }
}

HttpClient::HttpClient(ClientConfig cfg, std::unique_ptr<Transport> transport, Sleeper sleeper)
    : cfg_(std::move(cfg)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      slots_(static_cast<std::ptrdiff_t>(cfg_.concurrency_limit)) {
  cfg_.validate();
  if (const char* token = std::getenv(kApiTokenEnv)) token_ = token;
}

std::string HttpClient::complete(const PromptBundle& bundle) {
  HttpRequest request;
  request.url = cfg_.endpoint;
  request.body = build_wire_request(cfg_, bundle);
  request.timeout = cfg_.timeout;
  request.headers["Content-Type"] = "application/json";
  if (!token_.empty()) request.headers["Authorization"] = "Bearer " + token_;

  Failure last = Failure::none;
  std::string detail;
  for (unsigned attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) sleeper_(cfg_.backoff_base * (1LL << (attempt - 1)));
    HttpResponse response;
    slots_.acquire();
    try {
      response = transport_->post(request);
    } catch (...) {
      slots_.release();
      throw;
    }
    slots_.release();

    if (response.status == 0) {
      last = response.timed_out ? Failure::timeout : Failure::connection;
      detail = response.error;
    } else if (response.status == 429) {
      last = Failure::rate_limited;
      detail = "HTTP 429";
    } else if (response.status >= 500) {
      last = Failure::server;
      detail = "HTTP " + std::to_string(response.status);
    } else if (response.status >= 200 && response.status < 300) {
      return parse_wire_response(response.body);
    } else {
      throw Error(Errc::HttpError, "endpoint answered HTTP " + std::to_string(response.status));
    }
  }
  const std::string tries = " after " + std::to_string(cfg_.max_retries + 1) + " attempts";
  switch (last) {
    case Failure::rate_limited:
      throw Error(Errc::RateLimited, "endpoint rate-limited the request" + tries);
    case Failure::timeout:
      throw Error(Errc::Timeout, "endpoint timed out" + tries);
    default:
      throw Error(Errc::HttpError, "request failed (" + detail + ")" + tries);
  }
}

}  // namespace mmgl
