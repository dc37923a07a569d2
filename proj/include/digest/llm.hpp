#pragma once

#include <memory>
#include <string>

#include "digest/errors.hpp"
#include "digest/http.hpp"
#include "digest/retry.hpp"

namespace digest::llm {

enum class ErrorCategory { Auth, RateLimit, Transport, Safety, Malformed };

std::string_view category_name(ErrorCategory category);

class ProviderError : public Error {
public:
    ProviderError(ErrorCategory category, const std::string& detail)
        : Error(std::string(category_name(category)) + ": " + detail), category_(category) {}

    ErrorCategory category() const { return category_; }

    // Auth, Safety and Malformed are terminal; RateLimit and Transport may be
    // retried.
    bool retryable() const {
        return category_ == ErrorCategory::RateLimit || category_ == ErrorCategory::Transport;
    }

private:
    ErrorCategory category_;
};

struct CompletionRequest {
    std::string prompt_text;
    std::string model_name = "gemini-1.5-pro";
    int max_output_tokens = 4096;
    double temperature = 0.3;  // in [0, 2]
};

struct CompletionResult {
    std::string text;
    long provider_latency_ms = 0;
    int attempts = 1;
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;

    // Returns generated text, retrying retryable failures per the provider's
    // backoff policy. Throws ProviderError once retries are exhausted or on a
    // non-retryable category.
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

struct GeminiOptions {
    std::string base_url = "https://generativelanguage.googleapis.com";
    std::string api_key;
    RetryPolicy retry;
};

// REST client for the hosted Gemini generateContent endpoint (or any
// compatible gateway).
class GeminiClient : public CompletionProvider {
public:
    GeminiClient(std::shared_ptr<HttpTransport> transport, GeminiOptions options);

    CompletionResult complete(const CompletionRequest& request) override;

private:
    std::shared_ptr<HttpTransport> transport_;
    GeminiOptions options_;
    Backoff backoff_;
};

// Deterministic offline double. For a prompt rendered over a digest payload it
// answers "[MOCK <kind-or-UNKNOWN>] n=<article count>" followed by the first
// sentence of each abstract, one per line, in payload order. Merge prompts get
// the deduplicated union of the partial analyses' lines.
class MockProvider : public CompletionProvider {
public:
    CompletionResult complete(const CompletionRequest& request) override;
};

}  // namespace digest::llm
