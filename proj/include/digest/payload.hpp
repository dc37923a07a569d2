#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "digest/store.hpp"

namespace digest::payload {

struct TokenBudget {
    long max_tokens_per_request = 30000;
    double chars_per_token = 4.0;  // estimation ratio, Unicode scalars per token
};

struct Article {
    std::string id;
    std::string title;
    std::optional<std::string> doi;
    std::string abstract_text;

    bool operator==(const Article&) const = default;
};

struct DigestPayload {
    std::string period_label;  // "YYYY-MM"
    std::vector<Article> articles;
    long estimated_tokens = 0;
    int chunk_index = 0;
    int chunk_total = 1;
};

size_t unicode_scalar_count(std::string_view text);

// ceil(scalar count / chars_per_token); empty text estimates to zero.
long estimate_tokens(std::string_view text, const TokenBudget& budget);

Article article_from_entry(const store::CorpusEntry& entry);

// Greedy in-order packing: an article joins the current chunk while the
// running estimate (JSON envelope included) stays within the budget.
// Abstracts are never split; an article that cannot fit alone raises
// OversizedArticle. Empty input yields a single empty chunk.
std::vector<DigestPayload> build_payloads(const std::vector<Article>& articles,
                                          const std::string& period_label,
                                          const TokenBudget& budget);

// Canonical JSON: {"period":...,"chunk":...,"chunk_total":...,"articles":[...]}
// with article keys id, title, doi, abstract in that order; no insignificant
// whitespace; byte-identical across calls.
std::string serialize_payload(const DigestPayload& p);
std::string serialize_article(const Article& a);

}  // namespace digest::payload
