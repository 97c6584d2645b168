#pragma once

// HTTP-backed implementations of the chat transport and the classifier
// backend. Kept separate from the pure modules so that headers without a
// network dependency stay lightweight.

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "dropeval/chat.hpp"
#include "dropeval/png.hpp"
#include "dropeval/similarity.hpp"

namespace dropeval {

namespace detail {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /path or /
};

inline SplitUrl split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos)
    throw std::invalid_argument("endpoint must be an http(s) URL: " + url);
  const std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace detail

/// Chat-completion client over HTTP. Retries transport failures with a
/// linear backoff; the caller owns retry policy for bad content.
class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(ChatClientConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw std::invalid_argument("chat endpoint not configured");
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }

  std::string complete(const ChatRequest& request) override {
    const detail::SplitUrl url = detail::split_url(config_.endpoint);
    const std::string body = chat_request_body(request).dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms * attempt));
      httplib::Client client(url.base);
      client.set_connection_timeout(config_.timeout_seconds);
      client.set_read_timeout(config_.timeout_seconds);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
      auto res = client.Post(url.path, headers, body, "application/json");
      if (!res) {
        last_error = "no response from " + config_.endpoint;
        continue;
      }
      if (res->status != 200) {
        last_error = "status " + std::to_string(res->status) + " from " + config_.endpoint;
        continue;
      }
      try {
        const nlohmann::json doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const std::exception& e) {
        last_error = std::string("malformed completion response: ") + e.what();
      }
    }
    throw TransportError(last_error);
  }

  std::string id() const override { return "http:" + config_.model; }

 private:
  ChatClientConfig config_;
  std::string api_key_;
};

/// External letter classifier: POSTs the PNG bytes of a capture and expects
/// a 200 response whose body maps each letter "A".."Z" to a probability.
/// Anything else raises BackendUnavailableError.
class HttpClassifier final : public ClassifierBackend {
 public:
  explicit HttpClassifier(std::string endpoint, int timeout_seconds = 60)
      : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {
    if (endpoint_.empty()) throw std::invalid_argument("classifier endpoint not configured");
  }

  /// Environment fallback for the endpoint when no flag is given.
  static constexpr const char* kEndpointEnv = "DROPEVAL_CLASSIFIER_URL";

  SimilarityResult classify(const RasterImage& image) override {
    const detail::SplitUrl url = detail::split_url(endpoint_);
    const std::vector<std::uint8_t> bytes = png::encode_gray8(image.to_gray());

    httplib::Client client(url.base);
    client.set_connection_timeout(timeout_seconds_);
    client.set_read_timeout(timeout_seconds_);
    auto res = client.Post(url.path, reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                           "image/png");
    if (!res) throw BackendUnavailableError("no response from " + endpoint_);
    if (res->status != 200)
      throw BackendUnavailableError("status " + std::to_string(res->status) + " from " + endpoint_);

    SimilarityResult result;
    result.model_id = id();
    try {
      const nlohmann::json doc = nlohmann::json::parse(res->body);
      for (int i = 0; i < kLetterCount; ++i)
        result.probs[i] = doc.at(std::string(1, kLetters[i])).get<double>();
    } catch (const std::exception& e) {
      throw BackendUnavailableError(std::string("malformed classifier response: ") + e.what());
    }
    return result;
  }

  std::string id() const override { return "external:" + endpoint_; }

 private:
  std::string endpoint_;
  int timeout_seconds_;
};

}  // namespace dropeval
