#pragma once

// HTTPS+JSON adapters for hosted chat models. Each adapter owns the mapping
// between a plain prompt string and one vendor's request/response shape.

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pwqc/error.hpp"
#include "pwqc/harness.hpp"

namespace pwqc {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

struct HttpEndpoint {
  std::string base_url;  // scheme://host[:port]
  std::string path;
  std::chrono::seconds timeout{60};
};

namespace detail {

inline std::string post_json(const HttpEndpoint& ep, const httplib::Headers& headers, const nlohmann::json& body) {
  httplib::Client cli(ep.base_url);
  cli.set_connection_timeout(ep.timeout);
  cli.set_read_timeout(ep.timeout);
  cli.set_write_timeout(ep.timeout);
  auto res = cli.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) throw TransientError("request to " + ep.base_url + " failed: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403)
    throw AuthError("provider rejected credentials (HTTP " + std::to_string(res->status) + ")");
  if (res->status == 408 || res->status == 429 || res->status >= 500)
    throw TransientError("provider returned HTTP " + std::to_string(res->status));
  if (res->status != 200)
    throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
  return res->body;
}

inline nlohmann::json parse_body(const std::string& body) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("unparseable provider response: ") + e.what());
  }
}

}  // namespace detail

// OpenAI chat-completions shape; also used for DeepSeek and any compatible
// server (vLLM, llama.cpp server, ...).
class OpenAICompatibleProvider : public Provider {
 public:
  OpenAICompatibleProvider(std::string api_key, std::string model, HttpEndpoint endpoint)
      : api_key_(std::move(api_key)), model_(std::move(model)), endpoint_(std::move(endpoint)) {}

  std::string model() const override { return model_; }

  static nlohmann::json request_body(const std::string& model, const std::string& prompt) {
    return {{"model", model}, {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  }

  static std::string response_text(const nlohmann::json& j) {
    try {
      const auto& content = j.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string{} : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected chat-completions response: ") + e.what());
    }
  }

  std::string complete(const CompletionRequest& req) const override {
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    return response_text(detail::parse_body(detail::post_json(endpoint_, headers, request_body(model_, req.prompt))));
  }

 private:
  std::string api_key_;
  std::string model_;
  HttpEndpoint endpoint_;
};

class GeminiProvider : public Provider {
 public:
  GeminiProvider(std::string api_key, std::string model, std::string base_url)
      : api_key_(std::move(api_key)), model_(std::move(model)), base_url_(std::move(base_url)) {}

  std::string model() const override { return model_; }

  static nlohmann::json request_body(const std::string& prompt) {
    return {{"contents", nlohmann::json::array({{{"role", "user"}, {"parts", {{{"text", prompt}}}}}})}};
  }

  static std::string response_text(const nlohmann::json& j) {
    try {
      std::string out;
      for (const auto& part : j.at("candidates").at(0).at("content").at("parts"))
        if (part.contains("text")) out += part.at("text").get<std::string>();
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected generateContent response: ") + e.what());
    }
  }

  std::string complete(const CompletionRequest& req) const override {
    HttpEndpoint ep{base_url_, "/v1beta/models/" + model_ + ":generateContent"};
    httplib::Headers headers{{"x-goog-api-key", api_key_}};
    return response_text(detail::parse_body(detail::post_json(ep, headers, request_body(req.prompt))));
  }

 private:
  std::string api_key_;
  std::string model_;
  std::string base_url_;
};

class CohereProvider : public Provider {
 public:
  CohereProvider(std::string api_key, std::string model, std::string base_url)
      : api_key_(std::move(api_key)), model_(std::move(model)), base_url_(std::move(base_url)) {}

  std::string model() const override { return model_; }

  static nlohmann::json request_body(const std::string& model, const std::string& prompt) {
    return {{"model", model}, {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  }

  static std::string response_text(const nlohmann::json& j) {
    try {
      std::string out;
      for (const auto& part : j.at("message").at("content"))
        if (part.value("type", "text") == "text") out += part.at("text").get<std::string>();
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected chat response: ") + e.what());
    }
  }

  std::string complete(const CompletionRequest& req) const override {
    HttpEndpoint ep{base_url_, "/v2/chat"};
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    return response_text(detail::parse_body(detail::post_json(ep, headers, request_body(model_, req.prompt))));
  }

 private:
  std::string api_key_;
  std::string model_;
  std::string base_url_;
};

// Provider names accepted by make_provider, with the environment variable
// holding each one's credential.
struct ProviderInfo {
  std::string_view name;
  std::string_view env_var;
  std::string_view default_model;
  std::string_view default_base_url;
};

inline constexpr ProviderInfo kProviders[] = {
    {"openai", "OPENAI_API_KEY", "gpt-4o-mini", "https://api.openai.com"},
    {"deepseek", "DEEPSEEK_API_KEY", "deepseek-chat", "https://api.deepseek.com"},
    {"gemini", "GEMINI_API_KEY", "gemini-1.5-flash", "https://generativelanguage.googleapis.com"},
    {"cohere", "COHERE_API_KEY", "command-r", "https://api.cohere.com"},
    {"openai-compatible", "PWQC_COMPAT_API_KEY", "llama3", "http://localhost:8000"},
    {"mock", "", "good", ""},
};

struct ProviderOptions {
  std::string name;
  std::optional<std::string> model;     // persona name for the mock
  std::optional<std::string> base_url;
};

inline std::unique_ptr<Provider> make_provider(const ProviderOptions& opts, const EnvLookup& env) {
  const ProviderInfo* info = nullptr;
  for (const auto& p : kProviders)
    if (p.name == opts.name) info = &p;
  if (!info) throw InputError("unknown provider '" + opts.name + "'");

  const std::string model = opts.model.value_or(std::string(info->default_model));
  if (info->name == "mock") {
    auto persona = MockProvider::persona_from_name(model);
    if (!persona) throw InputError("unknown mock persona '" + model + "' (blank, noeq, headers, good)");
    return std::make_unique<MockProvider>(*persona);
  }

  auto key = env(std::string(info->env_var));
  if (!key || key->empty()) {
    // a local OpenAI-compatible server usually needs no key
    if (info->name != "openai-compatible") throw AuthError(std::string(info->env_var) + " is not set");
    key = "";
  }
  const std::string base = opts.base_url.value_or(std::string(info->default_base_url));
  if (info->name == "openai") return std::make_unique<OpenAICompatibleProvider>(*key, model, HttpEndpoint{base, "/v1/chat/completions"});
  if (info->name == "deepseek") return std::make_unique<OpenAICompatibleProvider>(*key, model, HttpEndpoint{base, "/chat/completions"});
  if (info->name == "openai-compatible")
    return std::make_unique<OpenAICompatibleProvider>(*key, model, HttpEndpoint{base, "/v1/chat/completions"});
  if (info->name == "gemini") return std::make_unique<GeminiProvider>(*key, model, base);
  return std::make_unique<CohereProvider>(*key, model, base);
}

}  // namespace pwqc
