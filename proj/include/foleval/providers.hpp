#ifndef FOLEVAL_PROVIDERS_HPP
#define FOLEVAL_PROVIDERS_HPP

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "foleval/errors.hpp"
#include "foleval/text.hpp"

namespace foleval {

// ---------------------------------------------------------------------------
// Chat types
// ---------------------------------------------------------------------------

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 1024;
  std::optional<int64_t> seed;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  long latency_ms = 0;
};

struct ProviderConfig {
  std::string base_url;
  std::string api_key_env_name;
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_base_ms = 250;
  int parallelism_limit = 4;
};

// Canonical prompt bytes for transcript lookup: "role\ncontent\n" per message,
// NFC-normalized, hashed with 64-bit FNV-1a.
inline std::string prompt_text(const ChatRequest& req) {
  std::string s;
  for (const auto& m : req.messages) {
    s += m.role;
    s += '\n';
    s += m.content;
    s += '\n';
  }
  return text::nfc(s);
}

inline uint64_t prompt_hash(const ChatRequest& req) {
  return text::fnv1a64(prompt_text(req));
}

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

// ---------------------------------------------------------------------------
// Scripted provider: exact-prompt-hash lookup, no network ever
// ---------------------------------------------------------------------------

class ScriptedChatProvider : public ChatProvider {
 public:
  ScriptedChatProvider() = default;

  void add_entry(const std::string& prompt, std::vector<std::string> responses) {
    add_entry_hash(text::fnv1a64(text::nfc(prompt)), std::move(responses));
  }

  void add_entry_for(const ChatRequest& req, std::vector<std::string> responses) {
    add_entry_hash(prompt_hash(req), std::move(responses));
  }

  void set_default_responses(std::vector<std::string> responses) {
    default_responses_ = std::move(responses);
  }

  ChatResponse complete(const ChatRequest& req) override {
    uint64_t h = prompt_hash(req);
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
    const std::vector<std::string>* responses = nullptr;
    auto it = entries_.find(h);
    if (it != entries_.end()) {
      responses = &it->second;
    } else if (!default_responses_.empty()) {
      responses = &default_responses_;
    } else {
      throw Error(Errc::malformed_response,
                  "transcript miss for prompt hash " + text::to_hex(h));
    }
    size_t n = seen_[h]++;
    if (n >= responses->size()) n = responses->size() - 1;  // clamp to last
    ChatResponse resp;
    resp.content = (*responses)[n];
    resp.finish_reason = "stop";
    resp.latency_ms = 0;
    return resp;
  }

  int calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
  }

  void reset_sequence() {
    std::lock_guard<std::mutex> lock(mutex_);
    seen_.clear();
  }

 private:
  void add_entry_hash(uint64_t h, std::vector<std::string> responses) {
    if (responses.empty()) {
      throw Error(Errc::transcript_format, "entry with empty response list");
    }
    auto [it, inserted] = entries_.emplace(h, std::move(responses));
    if (!inserted) {
      throw Error(Errc::transcript_format,
                  "duplicate transcript key " + text::to_hex(h));
    }
  }

  mutable std::mutex mutex_;
  std::map<uint64_t, std::vector<std::string>> entries_;
  std::map<uint64_t, size_t> seen_;
  std::vector<std::string> default_responses_;
  int calls_ = 0;

  friend std::shared_ptr<ScriptedChatProvider> scripted_provider_from(const std::string&);
};

// Transcript file: JSON object
//   {"entries": [{"prompt": "...", "prompt_hash": "hex16"?, "responses": [...]} ...],
//    "default_responses": [...]?}
// Either prompt or prompt_hash must be present; both present must agree.
inline std::shared_ptr<ScriptedChatProvider> scripted_provider_from(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open transcript file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::transcript_format, std::string("transcript parse: ") + e.what());
  }
  auto provider = std::make_shared<ScriptedChatProvider>();
  try {
    for (const auto& entry : j.value("entries", nlohmann::json::array())) {
      std::vector<std::string> responses;
      if (entry.contains("responses")) {
        for (const auto& r : entry.at("responses")) responses.push_back(r.get<std::string>());
      } else if (entry.contains("response")) {
        responses.push_back(entry.at("response").get<std::string>());
      }
      if (responses.empty()) {
        throw Error(Errc::transcript_format, "entry without responses");
      }
      std::optional<uint64_t> hash;
      if (entry.contains("prompt")) {
        hash = text::fnv1a64(text::nfc(entry.at("prompt").get<std::string>()));
      }
      if (entry.contains("prompt_hash")) {
        uint64_t h = std::stoull(entry.at("prompt_hash").get<std::string>(), nullptr, 16);
        if (hash && *hash != h) {
          throw Error(Errc::transcript_format,
                      "prompt_hash disagrees with prompt for " + text::to_hex(h));
        }
        hash = h;
      }
      if (!hash) throw Error(Errc::transcript_format, "entry without prompt or prompt_hash");
      provider->add_entry_hash(*hash, std::move(responses));
    }
    if (j.contains("default_responses")) {
      std::vector<std::string> defaults;
      for (const auto& r : j.at("default_responses")) defaults.push_back(r.get<std::string>());
      provider->set_default_responses(std::move(defaults));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::transcript_format, std::string("transcript schema: ") + e.what());
  }
  return provider;
}

// ---------------------------------------------------------------------------
// Admission control
// ---------------------------------------------------------------------------

class AdmissionGate {
 public:
  explicit AdmissionGate(int limit) : available_(limit) {}

  class Ticket {
   public:
    explicit Ticket(AdmissionGate& gate) : gate_(gate) { gate_.acquire(); }
    ~Ticket() { gate_.release(); }
    Ticket(const Ticket&) = delete;
    Ticket& operator=(const Ticket&) = delete;

   private:
    AdmissionGate& gate_;
  };

 private:
  void acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

// ---------------------------------------------------------------------------
// Retry with exponential backoff and full jitter
// ---------------------------------------------------------------------------

using SleepFn = std::function<void(int /*ms*/)>;

inline void default_sleep(int ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

namespace detail {
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
inline double uniform01(uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}
}  // namespace detail

// Runs attempt() up to cfg.max_retries + 1 times. Retries RateLimited and
// Timeout; AuthError and everything else propagate immediately.
template <typename Fn>
auto with_retries(const ProviderConfig& cfg, Fn&& attempt, const SleepFn& sleep = default_sleep,
                  uint64_t jitter_seed = 0x5eedull) -> decltype(attempt()) {
  uint64_t rng = jitter_seed;
  for (int n = 0;; ++n) {
    try {
      return attempt();
    } catch (const Error& e) {
      bool transient = e.code() == Errc::rate_limited || e.code() == Errc::timeout;
      if (!transient || n >= cfg.max_retries) throw;
      double jitter = detail::uniform01(rng);
      int delay = static_cast<int>(cfg.backoff_base_ms * std::pow(2.0, n) * jitter);
      sleep(delay);
    }
  }
}

// ---------------------------------------------------------------------------
// Network chat provider (OpenAI-compatible wire protocol)
// ---------------------------------------------------------------------------

namespace detail {
struct SplitUrl {
  std::string origin;       // scheme://host:port
  std::string path_prefix;  // possibly empty, no trailing slash
};
inline SplitUrl split_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::config_error, "base_url missing scheme: " + base_url);
  }
  auto path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}
}  // namespace detail

class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderConfig cfg, SleepFn sleep = default_sleep)
      : cfg_(std::move(cfg)), gate_(cfg_.parallelism_limit), sleep_(std::move(sleep)) {}

  ChatResponse complete(const ChatRequest& req) override;

 private:
  ProviderConfig cfg_;
  AdmissionGate gate_;
  SleepFn sleep_;
};

// ---------------------------------------------------------------------------
// Embedding providers
// ---------------------------------------------------------------------------

struct TokenVector {
  std::string token;
  std::vector<double> values;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Tokenizes per foleval::text::tokenize and returns one vector per token,
  // order preserved. Deterministic per provider instance.
  virtual std::vector<TokenVector> embed_tokens(const std::string& input,
                                                const std::string& language) = 0;
};

// Deterministic offline embedder: every distinct token maps to a unit vector
// drawn from a fixed-seed pseudo-random stream keyed by the token bytes.
class HashEmbedding : public EmbeddingProvider {
 public:
  explicit HashEmbedding(size_t dim = 64, uint64_t seed = 0x0f01e7a1u)
      : dim_(dim), seed_(seed) {}

  std::vector<TokenVector> embed_tokens(const std::string& input,
                                        const std::string& language) override {
    (void)language;  // tokenization is script-driven, not tag-driven
    if (text::trim(input).empty()) {
      throw Error(Errc::empty_tokenization, "empty input text");
    }
    std::vector<TokenVector> out;
    for (const auto& tok : text::tokenize(input)) {
      out.push_back({tok, vector_for(tok)});
    }
    if (out.empty()) {
      throw Error(Errc::empty_tokenization, "no tokens in input text");
    }
    return out;
  }

  std::vector<double> vector_for(const std::string& token) const {
    uint64_t state = text::fnv1a64(token) ^ seed_;
    std::vector<double> v(dim_);
    // Box-Muller over the splitmix stream; pairs of uniforms per two normals
    for (size_t i = 0; i < dim_; i += 2) {
      double u1 = detail::uniform01(state);
      double u2 = detail::uniform01(state);
      if (u1 < 1e-300) u1 = 1e-300;
      double r = std::sqrt(-2.0 * std::log(u1));
      v[i] = r * std::cos(2.0 * M_PI * u2);
      if (i + 1 < dim_) v[i + 1] = r * std::sin(2.0 * M_PI * u2);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[0] = 1.0;
      norm = 1.0;
    }
    for (double& x : v) x /= norm;
    return v;
  }

  size_t dim() const { return dim_; }

 private:
  size_t dim_;
  uint64_t seed_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(ProviderConfig cfg, std::string model_id)
      : cfg_(std::move(cfg)), model_id_(std::move(model_id)) {}

  std::vector<TokenVector> embed_tokens(const std::string& input,
                                        const std::string& language) override;

 private:
  ProviderConfig cfg_;
  std::string model_id_;
};

}  // namespace foleval

#include "foleval/providers_http.hpp"

#endif  // FOLEVAL_PROVIDERS_HPP
