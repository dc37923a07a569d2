#include "digest/llm.hpp"

#include <doctest.h>

#include "digest/payload.hpp"
#include "digest/prompts.hpp"
#include "support/scripted_transport.hpp"

using namespace digest;
using namespace digest::llm;
using digest::testing::ScriptedTransport;

namespace {

std::string payload_text(int n_articles) {
    payload::DigestPayload p;
    p.period_label = "2024-09";
    for (int i = 0; i < n_articles; ++i) {
        p.articles.push_back({"W" + std::to_string(i), "Title", std::nullopt,
                              "First sentence " + std::to_string(i) + ". Second part follows."});
    }
    return payload::serialize_payload(p);
}

CompletionRequest request_for(prompts::SectionKind kind, int n_articles) {
    const auto rendered =
        prompts::render(prompts::default_template(kind), payload_text(n_articles));
    return CompletionRequest{rendered.full_text};
}

GeminiOptions fast_gemini(int max_attempts = 3) {
    GeminiOptions options;
    options.api_key = "test-key";
    options.retry.max_attempts = max_attempts;
    options.retry.initial_delay = std::chrono::milliseconds{5};
    options.retry.seed = 11;
    return options;
}

const std::string kGoodBody =
    R"({"candidates":[{"content":{"parts":[{"text":"generated digest text"}]},)"
    R"("finishReason":"STOP"}]})";

}  // namespace

TEST_SUITE("llm") {

TEST_CASE("mock answers with kind, count and first sentences in order") {
    MockProvider mock;
    const auto result = mock.complete(request_for(prompts::SectionKind::KeyFindings, 2));
    CHECK(result.text ==
          "[MOCK KeyFindings] n=2\nFirst sentence 0.\nFirst sentence 1.");
    CHECK(result.attempts == 1);
}

TEST_CASE("mock on an empty payload emits only the header") {
    MockProvider mock;
    CHECK(mock.complete(request_for(prompts::SectionKind::Themes, 0)).text ==
          "[MOCK Themes] n=0");
}

TEST_CASE("mock is deterministic") {
    MockProvider mock;
    const auto req = request_for(prompts::SectionKind::FutureDirections, 3);
    CHECK(mock.complete(req).text == mock.complete(req).text);
}

TEST_CASE("mock labels unrecognized instructions UNKNOWN") {
    MockProvider mock;
    CompletionRequest req{"Some custom instruction.\n\n" + payload_text(1)};
    CHECK(mock.complete(req).text.rfind("[MOCK UNKNOWN] n=1", 0) == 0);
}

TEST_CASE("mock rejects prompts without a payload") {
    MockProvider mock;
    CompletionRequest req{"no json here at all"};
    try {
        mock.complete(req);
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(e.category() == ErrorCategory::Malformed);
        CHECK_FALSE(e.retryable());
    }
}

TEST_CASE("mock merges partial analyses by deduplicating lines") {
    MockProvider mock;
    const std::string part1 = "[MOCK Themes] n=2\nline a\nline b";
    const std::string part2 = "[MOCK Themes] n=1\nline b\nline c";
    const auto merged =
        mock.complete(CompletionRequest{prompts::render_merge({part1, part2})});
    CHECK(merged.text == "[MOCK MERGE] parts=2\nline a\nline b\nline c");
}

TEST_CASE("gemini client parses a successful response") {
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<HttpResponse>{{200, kGoodBody}});
    GeminiClient client(transport, fast_gemini());
    const auto result = client.complete(CompletionRequest{"prompt", "gemini-1.5-pro"});
    CHECK(result.text == "generated digest text");
    CHECK(result.attempts == 1);

    const auto calls = transport->calls();
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].method == "POST");
    CHECK(calls[0].url ==
          "https://generativelanguage.googleapis.com/v1beta/models/gemini-1.5-pro"
          ":generateContent");
    CHECK(calls[0].body.find("\"text\":\"prompt\"") != std::string::npos);
    CHECK(calls[0].body.find("maxOutputTokens") != std::string::npos);
}

TEST_CASE("gemini client retries 429s and records attempts") {
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<HttpResponse>{{429, ""}, {429, ""}, {200, kGoodBody}});
    GeminiClient client(transport, fast_gemini());
    const auto result = client.complete(CompletionRequest{"p"});
    CHECK(result.attempts == 3);
    CHECK(transport->call_count() == 3);
}

TEST_CASE("gemini client retries a 503 once then succeeds") {
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<HttpResponse>{{503, ""}, {200, kGoodBody}});
    GeminiClient client(transport, fast_gemini());
    CHECK(client.complete(CompletionRequest{"p"}).attempts == 2);
}

TEST_CASE("persistent 429 exhausts retries as a RateLimit error") {
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<HttpResponse>{{429, ""}, {429, ""}, {429, ""}});
    GeminiClient client(transport, fast_gemini());
    try {
        client.complete(CompletionRequest{"p"});
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(e.category() == ErrorCategory::RateLimit);
        CHECK(e.retryable());
    }
    CHECK(transport->call_count() == 3);
}

TEST_CASE("401 is terminal: one attempt, no further requests") {
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<HttpResponse>{{401, ""}, {200, kGoodBody}});
    GeminiClient client(transport, fast_gemini());
    try {
        client.complete(CompletionRequest{"p"});
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(e.category() == ErrorCategory::Auth);
        CHECK_FALSE(e.retryable());
    }
    CHECK(transport->call_count() == 1);
}

TEST_CASE("safety blocks map to the Safety category") {
    SUBCASE("prompt feedback block") {
        auto transport = std::make_shared<ScriptedTransport>(std::vector<HttpResponse>{
            {200, R"({"promptFeedback":{"blockReason":"SAFETY"}})"}});
        GeminiClient client(transport, fast_gemini());
        try {
            client.complete(CompletionRequest{"p"});
            FAIL("expected ProviderError");
        } catch (const ProviderError& e) {
            CHECK(e.category() == ErrorCategory::Safety);
            CHECK_FALSE(e.retryable());
        }
        CHECK(transport->call_count() == 1);
    }
    SUBCASE("candidate finish reason") {
        auto transport = std::make_shared<ScriptedTransport>(std::vector<HttpResponse>{
            {200, R"({"candidates":[{"finishReason":"SAFETY"}]})"}});
        GeminiClient client(transport, fast_gemini());
        CHECK_THROWS_AS(client.complete(CompletionRequest{"p"}), ProviderError);
        CHECK(transport->call_count() == 1);
    }
}

TEST_CASE("malformed 200 bodies are terminal") {
    auto transport = std::make_shared<ScriptedTransport>(
        std::vector<HttpResponse>{{200, "not json"}});
    GeminiClient client(transport, fast_gemini());
    try {
        client.complete(CompletionRequest{"p"});
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        CHECK(e.category() == ErrorCategory::Malformed);
    }
    CHECK(transport->call_count() == 1);
}

}  // TEST_SUITE
