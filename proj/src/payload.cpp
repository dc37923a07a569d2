#include "digest/payload.hpp"

#include <cmath>

#include <json.hpp>

#include "digest/errors.hpp"

namespace digest::payload {

namespace {

nlohmann::ordered_json article_json(const Article& a) {
    nlohmann::ordered_json obj;
    obj["id"] = a.id;
    obj["title"] = a.title;
    if (a.doi) {
        obj["doi"] = *a.doi;
    } else {
        obj["doi"] = nullptr;
    }
    obj["abstract"] = a.abstract_text;
    return obj;
}

// Envelope sized with four-digit chunk fields so the accounted length never
// undershoots the final serialization (supports up to 10000 chunks).
long envelope_chars(const std::string& period_label) {
    nlohmann::ordered_json obj;
    obj["period"] = period_label;
    obj["chunk"] = 9999;
    obj["chunk_total"] = 9999;
    obj["articles"] = nlohmann::ordered_json::array();
    return long(unicode_scalar_count(obj.dump()));
}

}  // namespace

size_t unicode_scalar_count(std::string_view text) {
    size_t count = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++count;  // skip UTF-8 continuation bytes
    }
    return count;
}

long estimate_tokens(std::string_view text, const TokenBudget& budget) {
    if (budget.chars_per_token <= 0) throw ConfigError("chars_per_token must be positive");
    const size_t chars = unicode_scalar_count(text);
    if (chars == 0) return 0;
    return long(std::ceil(double(chars) / budget.chars_per_token));
}

Article article_from_entry(const store::CorpusEntry& entry) {
    return Article{entry.record.id, entry.record.title, entry.record.doi,
                   entry.record.abstract_text};
}

std::string serialize_article(const Article& a) { return article_json(a).dump(); }

std::string serialize_payload(const DigestPayload& p) {
    nlohmann::ordered_json obj;
    obj["period"] = p.period_label;
    obj["chunk"] = p.chunk_index;
    obj["chunk_total"] = p.chunk_total;
    auto articles = nlohmann::ordered_json::array();
    for (const auto& a : p.articles) articles.push_back(article_json(a));
    obj["articles"] = std::move(articles);
    return obj.dump();
}

std::vector<DigestPayload> build_payloads(const std::vector<Article>& articles,
                                          const std::string& period_label,
                                          const TokenBudget& budget) {
    if (budget.max_tokens_per_request < 1) throw ConfigError("token budget must be >= 1");
    const long envelope = envelope_chars(period_label);
    const auto tokens_for_chars = [&budget](long chars) {
        return long(std::ceil(double(chars) / budget.chars_per_token));
    };
    // +1 per article covers the list separator.
    const auto article_chars = [](const Article& a) {
        return long(unicode_scalar_count(serialize_article(a))) + 1;
    };

    std::vector<DigestPayload> chunks;
    std::vector<Article> current;
    long current_chars = envelope;

    auto flush = [&]() {
        DigestPayload p;
        p.period_label = period_label;
        p.articles = std::move(current);
        current = {};
        chunks.push_back(std::move(p));
        current_chars = envelope;
    };

    for (const auto& a : articles) {
        const long cost = article_chars(a);
        if (tokens_for_chars(envelope + cost) > budget.max_tokens_per_request) {
            throw OversizedArticle(a.id, tokens_for_chars(envelope + cost),
                                   budget.max_tokens_per_request);
        }
        if (!current.empty() &&
            tokens_for_chars(current_chars + cost) > budget.max_tokens_per_request) {
            flush();
        }
        current.push_back(a);
        current_chars += cost;
    }
    if (!current.empty() || chunks.empty()) flush();

    const int total = int(chunks.size());
    for (int i = 0; i < total; ++i) {
        chunks[i].chunk_index = i;
        chunks[i].chunk_total = total;
        chunks[i].estimated_tokens = estimate_tokens(serialize_payload(chunks[i]), budget);
    }
    return chunks;
}

}  // namespace digest::payload
