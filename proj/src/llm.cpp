#include "digest/llm.hpp"

#include <chrono>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "digest/extractive.hpp"
#include "digest/prompts.hpp"

namespace digest::llm {

namespace {

using Clock = std::chrono::steady_clock;

long ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

bool starts_with(std::string_view text, std::string_view prefix) {
    return text.substr(0, prefix.size()) == prefix;
}

std::string detect_kind_label(std::string_view prompt) {
    for (prompts::SectionKind kind : prompts::kAllKinds) {
        if (starts_with(prompt, prompts::default_template(kind).instruction_text)) {
            return std::string(prompts::kind_name(kind));
        }
    }
    return "UNKNOWN";
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

CompletionResult merge_partials(std::string_view prompt, Clock::time_point start) {
    const size_t body_start = prompts::merge_instruction().size() + 2;  // instruction + blank line
    std::string_view body =
        body_start <= prompt.size() ? prompt.substr(body_start) : std::string_view{};

    size_t parts = 1;
    size_t pos = 0;
    while ((pos = body.find(prompts::kMergePartSeparator, pos)) != std::string_view::npos) {
        ++parts;
        pos += prompts::kMergePartSeparator.size();
    }

    std::string text = "[MOCK MERGE] parts=" + std::to_string(parts);
    std::unordered_set<std::string> seen;
    for (auto& line : split_lines(body)) {
        if (line.empty() || line == "---" || starts_with(line, "[MOCK")) continue;
        if (!seen.insert(line).second) continue;
        text += "\n" + line;
    }
    return CompletionResult{std::move(text), ms_since(start), 1};
}

}  // namespace

std::string_view category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Auth: return "Auth";
        case ErrorCategory::RateLimit: return "RateLimit";
        case ErrorCategory::Transport: return "Transport";
        case ErrorCategory::Safety: return "Safety";
        case ErrorCategory::Malformed: return "Malformed";
    }
    return "Unknown";
}

CompletionResult MockProvider::complete(const CompletionRequest& request) {
    const auto start = Clock::now();
    const std::string& prompt = request.prompt_text;
    if (prompt.empty()) throw ProviderError(ErrorCategory::Malformed, "empty prompt");

    if (starts_with(prompt, prompts::merge_instruction())) {
        return merge_partials(prompt, start);
    }

    const size_t brace = prompt.find('{');
    if (brace == std::string::npos) {
        throw ProviderError(ErrorCategory::Malformed, "no payload JSON found in prompt");
    }
    const auto payload = nlohmann::ordered_json::parse(prompt.substr(brace), nullptr, false);
    if (payload.is_discarded() || !payload.is_object() || !payload.contains("articles") ||
        !payload["articles"].is_array()) {
        throw ProviderError(ErrorCategory::Malformed, "prompt does not embed a digest payload");
    }

    const auto& articles = payload["articles"];
    std::string text =
        "[MOCK " + detect_kind_label(prompt) + "] n=" + std::to_string(articles.size());
    for (const auto& article : articles) {
        std::string abstract;
        if (article.is_object() && article.contains("abstract") && article["abstract"].is_string()) {
            abstract = article["abstract"].get<std::string>();
        }
        const auto sentences = extractive::split_sentences(abstract);
        text += "\n" + (sentences.empty() ? std::string() : sentences.front());
    }
    return CompletionResult{std::move(text), ms_since(start), 1};
}

GeminiClient::GeminiClient(std::shared_ptr<HttpTransport> transport, GeminiOptions options)
    : transport_(std::move(transport)), options_(std::move(options)), backoff_(options_.retry) {
    if (!transport_) throw ConfigError("GeminiClient requires a transport");
}

CompletionResult GeminiClient::complete(const CompletionRequest& request) {
    if (request.prompt_text.empty()) {
        throw ProviderError(ErrorCategory::Malformed, "empty prompt");
    }
    const auto start = Clock::now();
    const std::string url =
        options_.base_url + "/v1beta/models/" + request.model_name + ":generateContent";

    nlohmann::json body;
    body["contents"] = nlohmann::json::array(
        {{{"role", "user"}, {"parts", nlohmann::json::array({{{"text", request.prompt_text}}})}}});
    body["generationConfig"] = {{"temperature", request.temperature},
                                {"maxOutputTokens", request.max_output_tokens}};
    const std::string body_text = body.dump();

    HttpHeaders headers;
    if (!options_.api_key.empty()) headers.emplace_back("x-goog-api-key", options_.api_key);
    headers.emplace_back("Content-Type", "application/json");

    const int max_attempts = options_.retry.max_attempts;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const HttpResponse resp = transport_->post(url, body_text, headers);

        if (resp.status == 200) {
            const auto doc = nlohmann::json::parse(resp.body, nullptr, false);
            if (doc.is_discarded() || !doc.is_object()) {
                throw ProviderError(ErrorCategory::Malformed, "unparseable provider response");
            }
            if (doc.contains("promptFeedback") && doc["promptFeedback"].is_object() &&
                doc["promptFeedback"].contains("blockReason")) {
                throw ProviderError(ErrorCategory::Safety,
                                    "prompt blocked: " + doc["promptFeedback"]["blockReason"].dump());
            }
            if (!doc.contains("candidates") || !doc["candidates"].is_array() ||
                doc["candidates"].empty()) {
                throw ProviderError(ErrorCategory::Malformed, "response carries no candidates");
            }
            const auto& candidate = doc["candidates"][0];
            if (candidate.contains("finishReason") && candidate["finishReason"] == "SAFETY") {
                throw ProviderError(ErrorCategory::Safety, "candidate blocked by safety filter");
            }
            std::string text;
            if (candidate.contains("content") && candidate["content"].contains("parts")) {
                for (const auto& part : candidate["content"]["parts"]) {
                    if (part.contains("text") && part["text"].is_string()) {
                        text += part["text"].get<std::string>();
                    }
                }
            }
            if (text.empty()) {
                throw ProviderError(ErrorCategory::Malformed, "response carries no text parts");
            }
            return CompletionResult{std::move(text), ms_since(start), attempt};
        }

        if (resp.status == 401 || resp.status == 403) {
            throw ProviderError(ErrorCategory::Auth,
                                "provider rejected credentials (" + std::to_string(resp.status) + ")");
        }

        ErrorCategory category;
        if (resp.status == 429) {
            category = ErrorCategory::RateLimit;
        } else if (resp.status == 0 || (resp.status >= 500 && resp.status < 600)) {
            category = ErrorCategory::Transport;
        } else {
            throw ProviderError(ErrorCategory::Malformed,
                                "unexpected provider status " + std::to_string(resp.status));
        }
        if (attempt == max_attempts) {
            throw ProviderError(category, "status " + std::to_string(resp.status) + " after " +
                                              std::to_string(attempt) + " attempts");
        }
        std::this_thread::sleep_for(backoff_.delay_after_attempt(attempt));
    }
    throw ProviderError(ErrorCategory::Transport, "retry loop exhausted");
}

}  // namespace digest::llm
