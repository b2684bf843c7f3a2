#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace tgen {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AuthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ReplayExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ReplayMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decoding parameters are always set explicitly; the pipeline never
// relies on remote defaults.
struct GenerationRequest {
    std::string system_role;
    std::string user_prompt;
    double temperature = 0.0;
    double top_p = 1.0;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
};

namespace detail {
inline std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;  // field separator
    h *= 0x100000001b3ULL;
    return h;
}
inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
    return s;
}
}  // namespace detail

// Stable hash of prompt content plus decoding parameters; detects
// prompt drift when replaying a recorded transcript.
inline std::string request_fingerprint(const GenerationRequest& r) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = detail::fnv1a(h, r.system_role);
    h = detail::fnv1a(h, r.user_prompt);
    auto num = [](double d) {
        std::ostringstream os;
        os << d;
        return os.str();
    };
    h = detail::fnv1a(h, num(r.temperature));
    h = detail::fnv1a(h, num(r.top_p));
    h = detail::fnv1a(h, num(r.frequency_penalty));
    h = detail::fnv1a(h, num(r.presence_penalty));
    return detail::to_hex(h);
}

struct TranscriptEntry {
    std::string fingerprint;
    std::string response;

    bool operator==(const TranscriptEntry&) const = default;
};

struct ProviderTranscript {
    std::vector<TranscriptEntry> entries;

    std::string to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : entries)
            arr.push_back({{"fingerprint", e.fingerprint}, {"response", e.response}});
        return arr.dump(2) + "\n";
    }

    static ProviderTranscript from_json(const std::string& text) {
        nlohmann::json arr = nlohmann::json::parse(text);
        if (!arr.is_array()) throw std::runtime_error("transcript is not a JSON array");
        ProviderTranscript t;
        for (const auto& je : arr)
            t.entries.push_back({je.at("fingerprint").get<std::string>(),
                                 je.at("response").get<std::string>()});
        return t;
    }

    static ProviderTranscript load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open transcript file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_json(buf.str());
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write transcript file: " + path);
        out << to_json();
    }
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string complete(const GenerationRequest& request) = 0;
    virtual std::string name() const = 0;
};

// Serves pre-recorded responses strictly in order, checking each
// request's fingerprint against the recording.
class ReplayProvider final : public Provider {
public:
    explicit ReplayProvider(ProviderTranscript transcript) : transcript_(std::move(transcript)) {}

    std::string complete(const GenerationRequest& request) override {
        if (next_ >= transcript_.entries.size())
            throw ReplayExhausted("transcript exhausted after " + std::to_string(next_) +
                                  " entries");
        const auto& entry = transcript_.entries[next_];
        const std::string fp = request_fingerprint(request);
        if (fp != entry.fingerprint)
            throw ReplayMismatch("fingerprint mismatch at entry " + std::to_string(next_) +
                                 ": expected " + entry.fingerprint + ", got " + fp);
        ++next_;
        return entry.response;
    }

    std::string name() const override { return "replay"; }

    size_t consumed() const { return next_; }

private:
    ProviderTranscript transcript_;
    size_t next_ = 0;
};

struct LiveProviderConfig {
    std::string base_url;  // e.g. "https://api.openai.com"
    std::string api_key;
    std::string model = "gpt-4o";
    std::string chat_path = "/v1/chat/completions";
    int timeout_seconds = 60;
    int max_transport_attempts = 3;

    // Reads TGEN_API_KEY, TGEN_API_BASE, TGEN_MODEL.
    static LiveProviderConfig from_env() {
        LiveProviderConfig c;
        if (const char* k = std::getenv("TGEN_API_KEY")) c.api_key = k;
        if (const char* b = std::getenv("TGEN_API_BASE")) c.base_url = b;
        if (const char* m = std::getenv("TGEN_MODEL")) c.model = m;
        if (c.base_url.empty()) c.base_url = "https://api.openai.com";
        return c;
    }
};

// OpenAI-style chat-completion backend. Model and endpoint are
// configuration; the pipeline itself is model-agnostic.
class LiveProvider final : public Provider {
public:
    explicit LiveProvider(LiveProviderConfig config) : config_(std::move(config)) {
        if (config_.api_key.empty())
            throw AuthError("no API credential configured (set TGEN_API_KEY)");
    }

    std::string complete(const GenerationRequest& request) override {
        nlohmann::json body{
            {"model", config_.model},
            {"messages",
             {{{"role", "system"}, {"content", request.system_role}},
              {{"role", "user"}, {"content", request.user_prompt}}}},
            {"temperature", request.temperature},
            {"top_p", request.top_p},
            {"frequency_penalty", request.frequency_penalty},
            {"presence_penalty", request.presence_penalty},
        };

        std::string last_error;
        for (int attempt = 1; attempt <= config_.max_transport_attempts; ++attempt) {
            if (attempt > 1)
                std::this_thread::sleep_for(std::chrono::milliseconds(200 << (attempt - 2)));
            httplib::Client client(config_.base_url);
            client.set_connection_timeout(config_.timeout_seconds);
            client.set_read_timeout(config_.timeout_seconds);
            httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
            auto res = client.Post(config_.chat_path, headers, body.dump(), "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 401 || res->status == 403)
                throw AuthError("credential rejected (HTTP " + std::to_string(res->status) + ")");
            if (res->status >= 500) {
                last_error = "server error HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
            try {
                nlohmann::json reply = nlohmann::json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw TransportError(std::string("unexpected response shape: ") + e.what());
            }
        }
        throw TransportError(last_error.empty() ? "transport failure" : last_error);
    }

    std::string name() const override { return "live:" + config_.model; }

private:
    LiveProviderConfig config_;
};

// Wraps another provider and captures (fingerprint, response) pairs so
// a live session can later be replayed byte-identically.
class RecordingProvider final : public Provider {
public:
    explicit RecordingProvider(std::shared_ptr<Provider> inner) : inner_(std::move(inner)) {}

    std::string complete(const GenerationRequest& request) override {
        std::string response = inner_->complete(request);
        transcript_.entries.push_back({request_fingerprint(request), response});
        return response;
    }

    std::string name() const override { return inner_->name() + "+record"; }

    const ProviderTranscript& transcript() const { return transcript_; }

private:
    std::shared_ptr<Provider> inner_;
    ProviderTranscript transcript_;
};

}  // namespace tgen
