#include <doctest.h>

#include <atomic>
#include <thread>

#include "tgen/llm.hpp"

using namespace tgen;

namespace {
GenerationRequest req(const std::string& prompt) {
    GenerationRequest r;
    r.system_role = "role";
    r.user_prompt = prompt;
    return r;
}
}  // namespace

TEST_CASE("fingerprint is stable and sensitive to every field") {
    auto a = req("hello");
    CHECK(request_fingerprint(a) == request_fingerprint(a));
    auto b = a;
    b.user_prompt = "hello!";
    CHECK(request_fingerprint(a) != request_fingerprint(b));
    auto c = a;
    c.temperature = 0.5;
    CHECK(request_fingerprint(a) != request_fingerprint(c));
    auto d = a;
    d.system_role = "other";
    CHECK(request_fingerprint(a) != request_fingerprint(d));
}

TEST_CASE("decoding parameter defaults match the fixed configuration") {
    GenerationRequest r;
    CHECK(r.temperature == 0.0);
    CHECK(r.top_p == 1.0);
    CHECK(r.frequency_penalty == 0.0);
    CHECK(r.presence_penalty == 0.0);
}

TEST_CASE("replay returns recorded text, then exhausts") {
    auto r = req("prompt one");
    ProviderTranscript t;
    t.entries.push_back({request_fingerprint(r), "{\"answer\":42}"});
    ReplayProvider provider(t);
    CHECK(provider.complete(r) == "{\"answer\":42}");
    CHECK_THROWS_AS(provider.complete(r), ReplayExhausted);
}

TEST_CASE("replay rejects a drifted prompt") {
    ProviderTranscript t;
    t.entries.push_back({request_fingerprint(req("original")), "response"});
    ReplayProvider provider(t);
    CHECK_THROWS_AS(provider.complete(req("drifted")), ReplayMismatch);
}

TEST_CASE("transcript serialization round-trips") {
    ProviderTranscript t;
    t.entries.push_back({"fp1", "first\nresponse"});
    t.entries.push_back({"fp2", "second"});
    auto back = ProviderTranscript::from_json(t.to_json());
    CHECK(back.entries == t.entries);
}

TEST_CASE("recording wraps a provider and preserves order") {
    ProviderTranscript inner_t;
    inner_t.entries.push_back({request_fingerprint(req("a")), "ra"});
    inner_t.entries.push_back({request_fingerprint(req("b")), "rb"});
    auto inner = std::make_shared<ReplayProvider>(inner_t);
    RecordingProvider rec(inner);
    CHECK(rec.transcript().entries.empty());
    rec.complete(req("a"));
    rec.complete(req("b"));
    REQUIRE(rec.transcript().entries.size() == 2);
    CHECK(rec.transcript().entries == inner_t.entries);

    // the recording replays the session byte-identically
    ReplayProvider again(rec.transcript());
    CHECK(again.complete(req("a")) == "ra");
    CHECK(again.complete(req("b")) == "rb");
}

TEST_CASE("live provider requires a credential") {
    LiveProviderConfig cfg;
    cfg.base_url = "http://localhost:1";
    CHECK_THROWS_AS((void)LiveProvider{cfg}, AuthError);
}

TEST_CASE("live provider speaks the chat-completion contract") {
    httplib::Server server;
    std::string seen_body, seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& q, httplib::Response& s) {
        seen_body = q.body;
        seen_auth = q.get_header_value("Authorization");
        nlohmann::json reply{
            {"choices", {{{"message", {{"role", "assistant"}, {"content", "  reply text "}}}}}}};
        s.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveProviderConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.api_key = "test-key";
    cfg.model = "test-model";
    LiveProvider provider(cfg);

    GenerationRequest r = req("ping");
    r.temperature = 0.0;
    CHECK(provider.complete(r) == "  reply text ");  // untrimmed

    auto body = nlohmann::json::parse(seen_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["top_p"] == 1.0);
    CHECK(body["frequency_penalty"] == 0.0);
    CHECK(body["presence_penalty"] == 0.0);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "ping");
    CHECK(seen_auth == "Bearer test-key");

    server.stop();
    worker.join();
}

TEST_CASE("rejected credential raises AuthError") {
    httplib::Server server;
    server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& s) {
        s.status = 401;
        s.set_content("{}", "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveProviderConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.api_key = "bad-key";
    LiveProvider provider(cfg);
    CHECK_THROWS_AS(provider.complete(req("x")), AuthError);

    server.stop();
    worker.join();
}

TEST_CASE("unreachable endpoint raises TransportError after retries") {
    LiveProviderConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens here
    cfg.api_key = "k";
    cfg.timeout_seconds = 1;
    LiveProvider provider(cfg);
    CHECK_THROWS_AS(provider.complete(req("x")), TransportError);
}
