#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "wrac/errors.hpp"
#include "wrac/tokens.hpp"

namespace wrac {

namespace detail {

/// Compact SHA-256, used only to derive stable content-addressed cache keys.
class Sha256 {
public:
    Sha256() { state_ = kInit; }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        total_ += len;
        while (len > 0) {
            std::size_t take = std::min<std::size_t>(64 - fill_, len);
            std::copy(p, p + take, buf_.begin() + static_cast<long>(fill_));
            fill_ += take;
            p += take;
            len -= take;
            if (fill_ == 64) {
                process(buf_.data());
                fill_ = 0;
            }
        }
    }

    std::string hex() {
        const std::uint64_t bits = total_ * 8;
        std::uint8_t pad = 0x80;
        update(&pad, 1);
        std::uint8_t zero = 0;
        while (fill_ != 56) update(&zero, 1);
        std::array<std::uint8_t, 8> len{};
        for (int i = 0; i < 8; ++i) {
            len[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
        }
        update(len.data(), 8);
        std::ostringstream os;
        os << std::hex << std::setfill('0');
        for (std::uint32_t w : state_) os << std::setw(8) << w;
        return os.str();
    }

private:
    static constexpr std::array<std::uint32_t, 8> kInit = {
        0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process(const std::uint8_t* p) {
        static constexpr std::array<std::uint32_t, 64> k = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::array<std::uint32_t, 64> w{};
        for (int i = 0; i < 16; ++i) {
            w[static_cast<std::size_t>(i)] =
                (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        }
        for (std::size_t i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, h] =
            std::tuple{state_[0], state_[1], state_[2], state_[3],
                       state_[4], state_[5], state_[6], state_[7]};
        for (std::size_t i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
            std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = s0 + maj;
            h = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        state_[0] += a; state_[1] += b; state_[2] += c; state_[3] += d;
        state_[4] += e; state_[5] += f; state_[6] += g; state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_{};
    std::array<std::uint8_t, 64> buf_{};
    std::size_t fill_ = 0;
    std::uint64_t total_ = 0;
};

inline std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

}  // namespace detail

struct ChatRequest {
    std::string model;
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
};

struct TokenUsage {
    long input_tokens = 0;
    long output_tokens = 0;
    long cached_tokens = 0;

    TokenUsage& operator+=(const TokenUsage& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        cached_tokens += o.cached_tokens;
        return *this;
    }
};

struct ChatExchange {
    ChatRequest request;
    std::string response_text;
    TokenUsage usage;
    long latency_ms = 0;
};

/// Identical requests hash to identical keys, so a cache hit never depends on
/// document processing order.
inline std::string cache_key(const ChatRequest& r) {
    nlohmann::json j;
    j["model"] = r.model;
    j["system"] = r.system_text;
    j["user"] = r.user_text;
    j["temperature"] = r.temperature;
    return detail::sha256_hex(j.dump());
}

inline nlohmann::ordered_json exchange_to_json(const ChatExchange& e) {
    nlohmann::ordered_json j;
    j["request"] = {{"model", e.request.model},
                    {"system", e.request.system_text},
                    {"user", e.request.user_text},
                    {"temperature", e.request.temperature}};
    j["response_text"] = e.response_text;
    j["usage"] = {{"input_tokens", e.usage.input_tokens},
                  {"output_tokens", e.usage.output_tokens},
                  {"cached_tokens", e.usage.cached_tokens}};
    j["latency_ms"] = e.latency_ms;
    return j;
}

inline ChatExchange exchange_from_json(const nlohmann::json& j) {
    ChatExchange e;
    const auto& r = j.at("request");
    e.request.model = r.value("model", "");
    e.request.system_text = r.value("system", "");
    e.request.user_text = r.value("user", "");
    e.request.temperature = r.value("temperature", 0.0);
    e.response_text = j.at("response_text").get<std::string>();
    if (j.contains("usage")) {
        const auto& u = j["usage"];
        e.usage.input_tokens = u.value("input_tokens", 0L);
        e.usage.output_tokens = u.value("output_tokens", 0L);
        e.usage.cached_tokens = u.value("cached_tokens", 0L);
    }
    e.latency_ms = j.value("latency_ms", 0L);
    return e;
}

/// Minimal chat-completion transport.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatExchange complete(const ChatRequest& request) = 0;
};

enum class ClientMode { record, replay, live };

inline ClientMode client_mode_from(std::string_view s) {
    if (s == "record") return ClientMode::record;
    if (s == "replay") return ClientMode::replay;
    if (s == "live") return ClientMode::live;
    throw ConfigError("unknown client mode: " + std::string(s) +
                      " (expected record, replay, or live)");
}

struct ClientConfig {
    ClientMode mode = ClientMode::replay;
    std::filesystem::path cache_dir = ".wrac_cache";
    std::string endpoint;  // e.g. http://localhost:8080/v1/chat/completions
    std::string api_key;

    /// Reads WRAC_LLM_ENDPOINT, WRAC_LLM_API_KEY, WRAC_LLM_MODE, WRAC_LLM_CACHE.
    static ClientConfig from_env() {
        ClientConfig cfg;
        if (const char* v = std::getenv("WRAC_LLM_ENDPOINT")) cfg.endpoint = v;
        if (const char* v = std::getenv("WRAC_LLM_API_KEY")) cfg.api_key = v;
        if (const char* v = std::getenv("WRAC_LLM_MODE")) cfg.mode = client_mode_from(v);
        if (const char* v = std::getenv("WRAC_LLM_CACHE")) cfg.cache_dir = v;
        return cfg;
    }
};

/// Content-addressed exchange store, one file per key. Writes go through a
/// temp file and an atomic rename so concurrent writers cannot tear an entry.
class ExchangeCache {
public:
    explicit ExchangeCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::optional<ChatExchange> load(const std::string& key) const {
        std::ifstream in(path_for(key));
        if (!in) return std::nullopt;
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        return exchange_from_json(j);
    }

    void store(const std::string& key, const ChatExchange& exchange) const {
        std::filesystem::create_directories(dir_);
        const std::filesystem::path final_path = path_for(key);
        static std::mt19937_64 rng{std::random_device{}()};
        const std::filesystem::path tmp =
            final_path.string() + ".tmp-" + std::to_string(rng());
        {
            std::ofstream out(tmp);
            out << exchange_to_json(exchange).dump(2) << "\n";
        }
        std::filesystem::rename(tmp, final_path);
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path path_for(const std::string& key) const {
        return dir_ / (key + ".json");
    }

    std::filesystem::path dir_;
};

/// Record/replay chat client over an OpenAI-style chat-completions endpoint.
///
/// replay: serve from cache only; a miss raises PlannerUnavailable.
/// record: serve from cache when present, otherwise call once and store.
/// live:   always call, never touch the cache.
class CachingChatClient : public ChatClient {
public:
    explicit CachingChatClient(ClientConfig config)
        : config_(std::move(config)), cache_(config_.cache_dir) {}

    ChatExchange complete(const ChatRequest& request) override {
        const std::string key = cache_key(request);
        if (config_.mode != ClientMode::live) {
            if (auto hit = cache_.load(key)) return *hit;
            if (config_.mode == ClientMode::replay) {
                throw PlannerUnavailable("replay cache miss for key " + key + " under " +
                                         cache_.dir().string());
            }
        }
        ChatExchange exchange = post(request);
        if (config_.mode == ClientMode::record) cache_.store(key, exchange);
        return exchange;
    }

private:
    ChatExchange post(const ChatRequest& request) const {
        if (config_.endpoint.empty()) {
            throw ConfigError("no chat endpoint configured (set WRAC_LLM_ENDPOINT)");
        }
        auto [origin, path] = split_endpoint(config_.endpoint);

        nlohmann::json body;
        body["model"] = request.model;
        body["temperature"] = request.temperature;
        body["messages"] = nlohmann::json::array(
            {{{"role", "system"}, {"content", request.system_text}},
             {{"role", "user"}, {"content", request.user_text}}});

        httplib::Client cli(origin);
        cli.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }

        const auto t0 = std::chrono::steady_clock::now();
        httplib::Result res = cli.Post(path, headers, body.dump(), "application/json");
        const auto t1 = std::chrono::steady_clock::now();

        if (!res) {
            throw TransportError("chat endpoint unreachable: " + origin, 0);
        }
        if (res->status < 200 || res->status >= 300) {
            throw TransportError("chat endpoint returned status " +
                                     std::to_string(res->status),
                                 res->status);
        }

        ChatExchange exchange;
        exchange.request = request;
        exchange.latency_ms = static_cast<long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());

        nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded()) {
            throw TransportError("chat endpoint returned unparseable body", res->status);
        }
        exchange.response_text =
            j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            const auto& u = j["usage"];
            exchange.usage.input_tokens = u.value("prompt_tokens", 0L);
            exchange.usage.output_tokens = u.value("completion_tokens", 0L);
            if (u.contains("prompt_tokens_details")) {
                exchange.usage.cached_tokens =
                    u["prompt_tokens_details"].value("cached_tokens", 0L);
            }
        } else {
            exchange.usage.input_tokens =
                count_tokens(request.system_text) + count_tokens(request.user_text);
            exchange.usage.output_tokens = count_tokens(exchange.response_text);
        }
        return exchange;
    }

    /// Splits a URL into origin (scheme://host:port) and request path.
    static std::pair<std::string, std::string> split_endpoint(const std::string& url) {
        std::size_t scheme = url.find("://");
        std::size_t path_start =
            url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
        if (path_start == std::string::npos) {
            return {url, "/v1/chat/completions"};
        }
        return {url.substr(0, path_start), url.substr(path_start)};
    }

    ClientConfig config_;
    ExchangeCache cache_;
};

}  // namespace wrac
