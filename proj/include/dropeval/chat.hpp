#pragma once

// Chat-completion client used by the response gathering stage. Every trial
// is a fresh single-turn conversation: one user message, one response.
//
// The HTTP transport speaks the common chat-completion convention: a JSON
// POST of {model, messages, temperature} whose reply carries the text at
// choices[0].message.content. Credentials come from an environment
// variable only. A deterministic mock transport with substring-matched
// canned responses makes the whole pipeline runnable offline.

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dropeval {

struct ChatClientConfig {
  std::string endpoint;                          // e.g. https://api.example.com/v1/chat/completions
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "DROPEVAL_API_KEY";  // credential source; never a flag or file
  double temperature = 1.0;
  int timeout_seconds = 60;
  int max_retries = 3;  // per trial, across transport and extraction failures
  int backoff_ms = 500;
};

struct ChatRequest {
  std::string model;
  double temperature = 1.0;
  std::string user_message;
};

class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what) : std::runtime_error("chat transport: " + what) {}
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  /// Issues one single-turn completion; returns the assistant text.
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
};

inline nlohmann::json chat_request_body(const ChatRequest& request) {
  return nlohmann::json{
      {"model", request.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.user_message}}})},
      {"temperature", request.temperature},
  };
}

/// Canned-response transport. Rules are checked in order; the first whose
/// needle occurs in the user message wins, else the default response is
/// returned. Requests are recorded for inspection.
class MockChatTransport final : public ChatTransport {
 public:
  struct Rule {
    std::string contains;
    std::string response;
  };

  struct Config {
    std::vector<Rule> rules;
    std::string default_response;
  };

  explicit MockChatTransport(std::vector<Rule> rules = {}, std::string default_response = "")
      : rules_(std::move(rules)), default_response_(std::move(default_response)) {}
  explicit MockChatTransport(Config config)
      : rules_(std::move(config.rules)), default_response_(std::move(config.default_response)) {}

  /// Loads a rule set from JSON:
  ///   {"default": "...", "rules": [{"contains": "...", "response": "..."},
  ///                                {"contains": "...", "response_file": "path"}]}
  /// response_file paths are resolved relative to the rules file.
  static Config load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TransportError("cannot read mock rules: " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in);
    Config config;
    for (const auto& r : doc.value("rules", nlohmann::json::array())) {
      Rule rule;
      rule.contains = r.at("contains").get<std::string>();
      if (r.contains("response_file")) {
        const std::filesystem::path file =
            path.parent_path() / r.at("response_file").get<std::string>();
        std::ifstream rf(file, std::ios::binary);
        if (!rf) throw TransportError("cannot read mock response file: " + file.string());
        rule.response.assign(std::istreambuf_iterator<char>(rf), std::istreambuf_iterator<char>());
      } else {
        rule.response = r.at("response").get<std::string>();
      }
      config.rules.push_back(std::move(rule));
    }
    config.default_response = doc.value("default", std::string{});
    return config;
  }

  std::string complete(const ChatRequest& request) override {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      requests_.push_back(request);
    }
    for (const Rule& rule : rules_)
      if (request.user_message.find(rule.contains) != std::string::npos) return rule.response;
    return default_response_;
  }

  std::string id() const override { return "mock"; }

  std::vector<ChatRequest> recorded_requests() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return requests_;
  }

 private:
  std::vector<Rule> rules_;
  std::string default_response_;
  mutable std::mutex mutex_;
  std::vector<ChatRequest> requests_;
};

}  // namespace dropeval
