#include <doctest.h>

#include <atomic>
#include <cstdlib>

#include "eftcot/gateway/http_transport.hpp"
#include "support/fixtures.hpp"
#include "support/local_server.hpp"

using namespace eftcot;
using namespace eftcot::gateway;

namespace {

ChatRequest request_with(std::string tag, std::string user = "hello") {
    ChatRequest r;
    r.system = "system text";
    r.user = std::move(user);
    r.tag = std::move(tag);
    return r;
}

StubEntry failing(StubFailure f) {
    StubEntry e;
    e.error = f;
    return e;
}

/// Routes requests to the server but pretends to be a live endpoint.
ModelEndpoint live_endpoint(const std::string& base_url, const std::string& env = "") {
    ModelEndpoint e;
    e.id = "live";
    e.base_url = base_url;
    e.model_name = "m";
    e.auth_env_var = env;
    e.timeout_s = 5;
    return e;
}

std::unique_ptr<Gateway> http_gateway(int max_retries, std::vector<std::chrono::milliseconds>* sleeps) {
    GatewayOptions o;
    o.retry.max_retries = max_retries;
    o.retry.jitter = 0.0;
    return std::make_unique<Gateway>(o, std::make_shared<HttpTransport>(), nullptr,
                                     [sleeps](std::chrono::milliseconds d) { sleeps->push_back(d); });
}

} // namespace

TEST_SUITE("gateway") {

TEST_CASE("stub entries match on tag, substring and endpoint; non-repeat entries are consumed") {
    StubEntry tagged = fixtures::reply_for("A1", "first");
    StubEntry by_text;
    by_text.contains = "special";
    by_text.reply = "matched text";
    by_text.repeat = true;
    StubEntry by_endpoint;
    by_endpoint.endpoint = "other";
    by_endpoint.reply = "other endpoint";
    by_endpoint.repeat = true;
    auto stub = std::make_shared<StubTransport>(std::vector<StubEntry>{tagged, by_text, by_endpoint});

    const auto ep = fixtures::stub_endpoint();
    CHECK(stub->send(ep, request_with("A1")).text == "first");
    CHECK(stub->send(ep, request_with("A2", "a special request")).text == "matched text");
    CHECK(stub->send(fixtures::stub_endpoint("other"), request_with("A1")).text == "other endpoint");
    CHECK_THROWS_AS(stub->send(ep, request_with("A1")), ProviderError);
    CHECK(stub->calls() == 4);
    CHECK(stub->remaining() == 2);
}

TEST_CASE("stub script lines parse every key") {
    auto e = stub_entry_from_json(R"({"match":"a3","reply":{"narrative":"x"},"repeat":true})");
    CHECK(e.stage == std::optional<std::string>("a3"));
    CHECK(e.reply == std::optional<std::string>(R"({"narrative":"x"})"));
    CHECK(e.repeat);
    e = stub_entry_from_json(R"({"match":"some words","error":"429"})");
    CHECK(e.contains == std::optional<std::string>("some words"));
    CHECK(e.error == StubFailure::RateLimited);
    CHECK_THROWS_AS(stub_entry_from_json(R"({"match":"A1"})"), ConfigError);
    CHECK_THROWS_AS(stub_entry_from_json(R"({"reply":"x","error":"auth"})"), ConfigError);
    CHECK_THROWS_AS(stub_entry_from_json(R"({"reply":"x","error":"weird"})"), ConfigError);
    CHECK_THROWS_AS(stub_entry_from_json("[1]"), ConfigError);
}

TEST_CASE("shipped stub scripts load") {
    CHECK(load_stub_script(fixtures::config_dir() / "stub" / "confession.jsonl").size() == 9);
    CHECK(load_stub_script(fixtures::config_dir() / "stub" / "sample_script.jsonl").size() == 26);
    CHECK_THROWS_AS(load_stub_script(fixtures::config_dir() / "stub" / "absent.jsonl"), ConfigError);
}

TEST_CASE("slot_of placeholders resolve to the response block holding the text") {
    StubEntry judge = fixtures::reply_for("judge", "{{slot_of:kind words}}: 5\n{{slot_of:harsh words}}: 1");
    auto stub = std::make_shared<StubTransport>(std::vector<StubEntry>{judge});
    ChatRequest r = request_with("judge");
    r.system = "Response A:\nsome harsh words\n\nResponse B:\nsome kind words\n";
    CHECK(stub->send(fixtures::stub_endpoint(), r).text == "B: 5\nA: 1");
}

TEST_CASE("transient failures are retried with growing backoff") {
    std::vector<std::chrono::milliseconds> sleeps;
    auto stub = std::make_shared<StubTransport>(std::vector<StubEntry>{
        failing(StubFailure::Transient), failing(StubFailure::RateLimited), failing(StubFailure::ServerError),
        fixtures::reply_for("", "ok")});
    GatewayOptions o;
    o.stub_only = true;
    o.retry.max_retries = 3;
    o.retry.base = std::chrono::milliseconds(100);
    o.retry.jitter = 0.0;
    Gateway gw(o, nullptr, stub, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    const auto resp = gw.complete_chat(fixtures::stub_endpoint(), request_with(""));
    CHECK(resp.text == "ok");
    CHECK(resp.attempt_count == 4);
    REQUIRE(sleeps.size() == 3);
    CHECK(sleeps[0].count() == 100);
    CHECK(sleeps[1].count() == 200);
    CHECK(sleeps[2].count() == 400);
}

TEST_CASE("retries stop at the budget and keep the attempt count") {
    std::vector<StubEntry> script(5, failing(StubFailure::ServerError));
    auto stub = std::make_shared<StubTransport>(script);
    GatewayOptions o;
    o.stub_only = true;
    o.retry.max_retries = 2;
    Gateway gw(o, nullptr, stub, [](std::chrono::milliseconds) {});
    try {
        gw.complete_chat(fixtures::stub_endpoint(), request_with(""));
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.attempts() == 3);
        CHECK(e.status() == 500);
    }
    CHECK(stub->calls() == 3);
}

TEST_CASE("auth and bad-request failures are not retried") {
    for (StubFailure f : {StubFailure::Auth, StubFailure::BadRequest}) {
        std::shared_ptr<StubTransport> stub;
        auto gw = fixtures::stub_gateway({failing(f), fixtures::reply_for("", "never")}, &stub);
        CHECK_THROWS_AS(gw->complete_chat(fixtures::stub_endpoint(), request_with("")), GatewayError);
        CHECK(stub->calls() == 1);
    }
}

TEST_CASE("backoff jitter stays inside its band and is seeded") {
    GatewayOptions o;
    o.retry.base = std::chrono::milliseconds(1000);
    o.retry.jitter = 0.2;
    o.jitter_seed = 9;
    Gateway a(o, nullptr, nullptr), b(o, nullptr, nullptr);
    for (int i = 1; i <= 4; ++i) {
        const auto d = a.backoff_delay(i);
        CHECK(d == b.backoff_delay(i));
        const double nominal = 1000.0 * std::pow(2.0, i - 1);
        CHECK(d.count() >= std::floor(nominal * 0.8));
        CHECK(d.count() <= std::ceil(nominal * 1.2));
    }
}

TEST_CASE("refusals are flagged from phrases and never thrown") {
    auto gw = fixtures::stub_gateway({fixtures::reply_for("", "I'm sorry, but I CAN'T  discuss this.", true)});
    const auto r = gw->complete_chat(fixtures::stub_endpoint(), request_with(""));
    CHECK(r.refusal);
    CHECK_FALSE(r.provider_refusal);
    CHECK(gw->refusal_detector().matches("很抱歉，我无法回答"));
    CHECK_FALSE(gw->refusal_detector().matches("I can help with that."));
}

TEST_CASE("empty completions are provider errors") {
    auto gw = fixtures::stub_gateway({fixtures::reply_for("", "   ", true)});
    CHECK_THROWS_AS(gw->complete_chat(fixtures::stub_endpoint(), request_with("")), ProviderError);
}

TEST_CASE("stub endpoints need a stub transport") {
    Gateway gw({}, nullptr, nullptr);
    CHECK_THROWS_AS(gw.complete_chat(fixtures::stub_endpoint(), request_with("")), ConfigError);
}

TEST_CASE("missing credentials raise AuthError before any request") {
    ::unsetenv("EFTCOT_TEST_MISSING_KEY");
    std::vector<std::chrono::milliseconds> sleeps;
    auto gw = http_gateway(0, &sleeps);
    CHECK_THROWS_AS(gw->complete_chat(live_endpoint("http://127.0.0.1:9/v1", "EFTCOT_TEST_MISSING_KEY"),
                                      request_with("")),
                    AuthError);
}

TEST_CASE("routing resolves mapped categories, then the default") {
    const RoutingTable preset = heterogeneous_preset();
    CHECK(preset.problems().empty());
    CHECK(resolve_route(preset, TopicCategory::Romance).id == "doubao-1.5-pro");
    CHECK(resolve_route(preset, TopicCategory::Family).id == "qwen-max");
    CHECK(resolve_route(preset, TopicCategory::Interpersonal).id == "deepseek-chat");
    CHECK(resolve_route(preset, TopicCategory::Therapy).id == "gpt-4o");

    RoutingTable partial({fixtures::stub_endpoint("a")}, {{TopicCategory::Career, "a"}});
    CHECK_FALSE(partial.problems().empty());
    CHECK(resolve_route(partial, TopicCategory::Career).id == "a");
    CHECK_THROWS_AS(resolve_route(partial, TopicCategory::Growth), RouteError);

    RoutingTable dangling({fixtures::stub_endpoint("a")}, {{TopicCategory::Career, "b"}}, "a");
    CHECK(dangling.problems().size() == 1);
}

TEST_CASE("base urls split into host and path prefix") {
    auto u = parse_base_url("https://api.example.com/v1/");
    CHECK(u.scheme_host_port == "https://api.example.com");
    CHECK(u.path_prefix == "/v1");
    u = parse_base_url("http://localhost:8080");
    CHECK(u.scheme_host_port == "http://localhost:8080");
    CHECK(u.path_prefix.empty());
    CHECK_THROWS_AS(parse_base_url("localhost/v1"), ConfigError);
}

TEST_CASE("chat request body carries messages and sampling parameters") {
    ChatRequest r = request_with("A1", "user text");
    r.params = {0.01, 0.7, 1500};
    const json body = json::parse(chat_request_body(fixtures::stub_endpoint("m1"), r));
    CHECK(body["model"] == "m1");
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "user text");
    CHECK(body["temperature"].get<double>() == doctest::Approx(0.01));
    CHECK(body["top_p"].get<double>() == doctest::Approx(0.7));
    CHECK(body["max_tokens"] == 1500);
}

TEST_CASE("completion bodies yield text, usage and content-filter refusals") {
    const auto ep = fixtures::stub_endpoint();
    auto r = parse_chat_response(
        R"({"choices":[{"message":{"content":"hi"},"finish_reason":"stop"}],"usage":{"prompt_tokens":3,"completion_tokens":1}})",
        ep);
    CHECK(r.text == "hi");
    REQUIRE(r.tokens.has_value());
    CHECK(r.tokens->prompt == 3);
    CHECK_FALSE(r.provider_refusal);
    r = parse_chat_response(R"({"choices":[{"message":{"content":""},"finish_reason":"content_filter"}]})", ep);
    CHECK(r.provider_refusal);
    CHECK_THROWS_AS(parse_chat_response("not json", ep), ProviderError);
    CHECK_THROWS_AS(parse_chat_response(R"({"choices":[]})", ep), ProviderError);
}

TEST_CASE("http transport talks to an OpenAI-compatible server") {
    fixtures::LocalServer srv;
    std::atomic<int> calls{0};
    std::string seen_auth, seen_model;
    srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (++calls == 1) {
            res.status = 503;
            return;
        }
        seen_auth = req.get_header_value("Authorization");
        seen_model = json::parse(req.body)["model"];
        res.set_content(R"({"choices":[{"message":{"content":"served"}}]})", "application/json");
    });
    ::setenv("EFTCOT_TEST_KEY", "secret", 1);
    std::vector<std::chrono::milliseconds> sleeps;
    auto gw = http_gateway(2, &sleeps);
    const auto resp = gw->complete_chat(live_endpoint(srv.base_url(), "EFTCOT_TEST_KEY"), request_with(""));
    CHECK(resp.text == "served");
    CHECK(resp.attempt_count == 2);
    CHECK(sleeps.size() == 1);
    CHECK(seen_auth == "Bearer secret");
    CHECK(seen_model == "m");
}

TEST_CASE("http status codes map onto the error taxonomy") {
    fixtures::LocalServer srv;
    srv.server().Post("/auth/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    srv.server().Post("/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
    srv.server().Post("/busy/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 429; });
    std::vector<std::chrono::milliseconds> sleeps;
    auto gw = http_gateway(1, &sleeps);
    CHECK_THROWS_AS(gw->complete_chat(live_endpoint(srv.base_url("/auth")), request_with("")), AuthError);
    CHECK_THROWS_AS(gw->complete_chat(live_endpoint(srv.base_url("/bad")), request_with("")), ProviderError);
    try {
        gw->complete_chat(live_endpoint(srv.base_url("/busy")), request_with(""));
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.status() == 429);
        CHECK(e.attempts() == 2);
    }
}

}
