#ifndef FOLEVAL_PROVIDERS_HTTP_HPP
#define FOLEVAL_PROVIDERS_HTTP_HPP

// HTTP transport for the provider interfaces. Split out so that the scripted
// paths stay free of httplib symbols.

#include <httplib.h>

#include "foleval/providers.hpp"

namespace foleval {

namespace detail {

inline std::string api_key_or_throw(const ProviderConfig& cfg) {
  if (cfg.api_key_env_name.empty()) return "";
  const char* key = std::getenv(cfg.api_key_env_name.c_str());
  if (!key || !*key) {
    throw Error(Errc::auth_error,
                "environment variable " + cfg.api_key_env_name + " is not set");
  }
  return key;
}

inline nlohmann::json post_json(const ProviderConfig& cfg, const std::string& endpoint,
                                const nlohmann::json& body, const std::string& api_key) {
  SplitUrl url = split_url(cfg.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(0, cfg.timeout_ms * 1000);
  client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
  auto res = client.Post(url.path_prefix + endpoint, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::timeout, "no response from " + url.origin + endpoint);
  }
  if (res->status == 401 || res->status == 403) {
    throw Error(Errc::auth_error, "status " + std::to_string(res->status));
  }
  if (res->status == 429) {
    throw Error(Errc::rate_limited, "status 429 from " + endpoint);
  }
  if (res->status >= 500) {
    throw Error(Errc::timeout, "transient status " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(Errc::malformed_response,
                "status " + std::to_string(res->status) + " from " + endpoint);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_response, std::string("response parse: ") + e.what());
  }
}

}  // namespace detail

inline ChatResponse HttpChatProvider::complete(const ChatRequest& req) {
  AdmissionGate::Ticket ticket(gate_);
  std::string api_key = detail::api_key_or_throw(cfg_);

  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : req.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  nlohmann::json body = {{"model", req.model_id},
                         {"messages", messages},
                         {"temperature", req.temperature},
                         {"max_tokens", req.max_tokens}};
  if (req.seed) body["seed"] = *req.seed;

  return with_retries(cfg_, [&]() -> ChatResponse {
    auto start = std::chrono::steady_clock::now();
    nlohmann::json j = detail::post_json(cfg_, "/chat/completions", body, api_key);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    ChatResponse resp;
    try {
      resp.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
      resp.finish_reason = j.at("choices").at(0).value("finish_reason", "");
      if (j.contains("usage")) {
        resp.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        resp.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_response, std::string("chat response shape: ") + e.what());
    }
    resp.latency_ms = static_cast<long>(elapsed.count());
    return resp;
  }, sleep_);
}

inline std::vector<TokenVector> HttpEmbeddingProvider::embed_tokens(
    const std::string& input, const std::string& language) {
  (void)language;
  std::vector<std::string> tokens = text::tokenize(input);
  if (tokens.empty()) {
    throw Error(Errc::empty_tokenization, "no tokens in input text");
  }
  std::string api_key = detail::api_key_or_throw(cfg_);
  nlohmann::json body = {{"model", model_id_}, {"input", tokens}};
  nlohmann::json j;
  try {
    j = with_retries(cfg_, [&] { return detail::post_json(cfg_, "/embeddings", body, api_key); });
  } catch (const Error& e) {
    if (e.code() == Errc::auth_error) throw;
    throw Error(Errc::embedding_error, e.what());
  }
  std::vector<TokenVector> out;
  try {
    const auto& data = j.at("data");
    if (data.size() != tokens.size()) {
      throw Error(Errc::embedding_error, "embedding count mismatch");
    }
    for (size_t i = 0; i < tokens.size(); ++i) {
      TokenVector tv;
      tv.token = tokens[i];
      for (const auto& x : data.at(i).at("embedding")) tv.values.push_back(x.get<double>());
      out.push_back(std::move(tv));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::embedding_error, std::string("embedding response shape: ") + e.what());
  }
  return out;
}

}  // namespace foleval

#endif  // FOLEVAL_PROVIDERS_HTTP_HPP
