#include "digest/ingest.hpp"

#include <algorithm>
#include <iostream>
#include <thread>
#include <unordered_set>

#include "digest/errors.hpp"

namespace digest::ingest {

namespace {

constexpr const char* kOpenAlexPrefix = "https://openalex.org/";
constexpr const char* kDoiPrefix = "https://doi.org/";

std::string strip_prefix(const std::string& value, const char* prefix) {
    const size_t n = std::char_traits<char>::length(prefix);
    return value.rfind(prefix, 0) == 0 ? value.substr(n) : value;
}

}  // namespace

std::string reconstruct_abstract(const InvertedAbstract& inv, ReconstructionStats* stats) {
    struct Placement {
        int position;
        size_t entry;
    };
    std::vector<Placement> placements;
    for (size_t i = 0; i < inv.size(); ++i) {
        for (int pos : inv[i].second) placements.push_back({pos, i});
    }
    // Stable sort keeps serialized mapping order among equal positions, so the
    // first-listed token wins position conflicts.
    std::stable_sort(placements.begin(), placements.end(),
                     [](const Placement& a, const Placement& b) { return a.position < b.position; });

    std::string text;
    int last_position = -1;
    for (const auto& p : placements) {
        if (p.position == last_position) {
            if (stats) ++stats->duplicate_positions;
            continue;
        }
        if (!text.empty()) text += ' ';
        text += inv[p.entry].first;
        last_position = p.position;
    }
    return text;
}

InvertedAbstract inverted_abstract_from_json(const nlohmann::ordered_json& obj,
                                             ReconstructionStats* stats) {
    InvertedAbstract inv;
    if (!obj.is_object()) return inv;
    for (const auto& [token, value] : obj.items()) {
        if (!value.is_array()) {
            if (stats) ++stats->repaired_entries;
            continue;
        }
        std::vector<int> positions;
        bool repaired = false;
        for (const auto& p : value) {
            if (!p.is_number_integer() || p.get<long>() < 0) {
                repaired = true;
                continue;
            }
            positions.push_back(p.get<int>());
        }
        if (!std::is_sorted(positions.begin(), positions.end())) {
            std::sort(positions.begin(), positions.end());
            repaired = true;
        }
        if (stats && repaired) ++stats->repaired_entries;
        if (positions.empty()) continue;
        inv.emplace_back(token, std::move(positions));
    }
    return inv;
}

std::string build_query_url(const WorkQuery& query, const std::string& base_url) {
    if (query.per_page < 1 || query.per_page > 200) {
        throw ConfigError("per_page must be in [1, 200]");
    }
    if (query.cursor.empty()) throw ConfigError("cursor must not be empty");
    if (query.concept_id.empty() ||
        !std::all_of(query.concept_id.begin(), query.concept_id.end(),
                     [](unsigned char c) { return std::isalnum(c); })) {
        throw ConfigError("concept_id must contain only [A-Za-z0-9]: '" + query.concept_id + "'");
    }
    std::string url = base_url;
    url += "?filter=from_publication_date:" + query.window.start.to_string();
    url += ",to_publication_date:" + query.window.end.to_string();
    url += ",concepts.id:" + query.concept_id;
    url += "&per-page=" + std::to_string(query.per_page);
    url += "&cursor=" + url_encode_component(query.cursor);
    if (query.contact_email) url += "&mailto=" + url_encode_component(*query.contact_email);
    return url;
}

std::optional<WorkRecord> normalize_work(const nlohmann::ordered_json& raw,
                                         const std::string& fetched_at,
                                         ReconstructionStats* stats) {
    if (!raw.is_object()) return std::nullopt;
    WorkRecord rec;
    if (raw.contains("id") && raw["id"].is_string()) rec.id = raw["id"].get<std::string>();
    if (rec.id.empty()) return std::nullopt;

    if (raw.contains("doi") && raw["doi"].is_string()) {
        rec.doi = strip_prefix(raw["doi"].get<std::string>(), kDoiPrefix);
    }
    if (raw.contains("title") && raw["title"].is_string()) {
        rec.title = raw["title"].get<std::string>();
    } else if (raw.contains("display_name") && raw["display_name"].is_string()) {
        rec.title = raw["display_name"].get<std::string>();
    }
    try {
        if (!raw.contains("publication_date") || !raw["publication_date"].is_string()) {
            return std::nullopt;
        }
        rec.publication_date = CalendarDate::parse(raw["publication_date"].get<std::string>());
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    if (raw.contains("abstract_inverted_index") && raw["abstract_inverted_index"].is_object()) {
        rec.abstract_text =
            reconstruct_abstract(inverted_abstract_from_json(raw["abstract_inverted_index"], stats), stats);
    }
    if (raw.contains("concepts") && raw["concepts"].is_array()) {
        for (const auto& c : raw["concepts"]) {
            if (c.is_object() && c.contains("id") && c["id"].is_string()) {
                rec.concepts.push_back(strip_prefix(c["id"].get<std::string>(), kOpenAlexPrefix));
            }
        }
    }
    rec.fetched_at = fetched_at;
    return rec;
}

OpenAlexClient::OpenAlexClient(std::shared_ptr<HttpTransport> transport, ClientOptions options)
    : transport_(std::move(transport)),
      options_(std::move(options)),
      limiter_(options_.rate_limit_rps),
      backoff_(options_.retry) {
    if (!transport_) throw ConfigError("OpenAlexClient requires a transport");
}

HttpResponse OpenAlexClient::get_with_retries(const std::string& url) {
    HttpResponse resp;
    for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
        limiter_.acquire();
        resp = transport_->get(url);
        if (!retryable_status(resp.status)) return resp;
        if (attempt < options_.retry.max_attempts) {
            std::this_thread::sleep_for(backoff_.delay_after_attempt(attempt));
        }
    }
    return resp;
}

FetchPage OpenAlexClient::fetch_page(const WorkQuery& query) {
    const std::string url = build_query_url(query, options_.works_url);
    const HttpResponse resp = get_with_retries(url);

    if (resp.status == 401 || resp.status == 403) {
        throw AuthError("OpenAlex rejected the request (" + std::to_string(resp.status) + ")");
    }
    if (resp.status == 429) {
        throw RateLimitExhausted("still rate limited after " +
                                 std::to_string(options_.retry.max_attempts) + " attempts");
    }
    if (resp.status != 200) {
        throw TransportError("request failed with status " + std::to_string(resp.status) +
                             (resp.body.empty() ? "" : ": " + resp.body.substr(0, 200)));
    }

    const auto doc = nlohmann::ordered_json::parse(resp.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("results") ||
        !doc["results"].is_array()) {
        throw MalformedResponse("response body is not an OpenAlex works page");
    }

    FetchPage page;
    if (doc.contains("meta") && doc["meta"].is_object()) {
        const auto& meta = doc["meta"];
        if (meta.contains("count") && meta["count"].is_number()) {
            page.total_count = meta["count"].get<long>();
        }
        if (meta.contains("next_cursor") && meta["next_cursor"].is_string()) {
            page.next_cursor = meta["next_cursor"].get<std::string>();
        }
    }

    const std::string fetched_at = utc_now_iso8601();
    ReconstructionStats stats;
    int dropped = 0;
    int out_of_window = 0;
    for (const auto& raw : doc["results"]) {
        auto rec = normalize_work(raw, fetched_at, &stats);
        if (!rec) {
            ++dropped;
            continue;
        }
        if (!query.window.contains(rec->publication_date)) {
            ++out_of_window;
            continue;
        }
        page.records.push_back(std::move(*rec));
    }
    if (stats.duplicate_positions > 0 || stats.repaired_entries > 0) {
        std::cerr << "warning: repaired " << stats.repaired_entries
                  << " inverted-index entries, dropped " << stats.duplicate_positions
                  << " duplicate positions\n";
    }
    if (dropped > 0 || out_of_window > 0) {
        std::cerr << "warning: skipped " << dropped << " malformed and " << out_of_window
                  << " out-of-window records\n";
    }
    return page;
}

std::vector<WorkRecord> OpenAlexClient::fetch_all(const DateWindow& window,
                                                  const std::string& concept_id) {
    WorkQuery query{window, concept_id, options_.per_page, "*", options_.contact_email};
    std::vector<WorkRecord> records;
    std::unordered_set<std::string> seen;
    int page_index = 1;
    for (;;) {
        FetchPage page;
        try {
            page = fetch_page(query);
        } catch (const AuthError& e) {
            throw AuthError("page " + std::to_string(page_index) + ": " + e.what());
        } catch (const RateLimitExhausted& e) {
            throw RateLimitExhausted("page " + std::to_string(page_index) + ": " + e.what());
        } catch (const MalformedResponse& e) {
            throw MalformedResponse("page " + std::to_string(page_index) + ": " + e.what());
        } catch (const TransportError& e) {
            throw TransportError("page " + std::to_string(page_index) + ": " + e.what());
        }
        for (auto& rec : page.records) {
            if (seen.insert(rec.id).second) records.push_back(std::move(rec));
        }
        if (!page.next_cursor) break;
        query.cursor = *page.next_cursor;
        ++page_index;
    }
    return records;
}

std::string OpenAlexClient::resolve_concept(const std::string& display_name) {
    const std::string url =
        options_.concepts_url + "?search=" + url_encode_component(display_name) + "&per-page=1";
    const HttpResponse resp = get_with_retries(url);
    if (resp.status != 200) {
        throw TransportError("concept lookup failed with status " + std::to_string(resp.status));
    }
    const auto doc = nlohmann::ordered_json::parse(resp.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("results") || !doc["results"].is_array()) {
        throw MalformedResponse("concept lookup returned an unexpected body");
    }
    for (const auto& item : doc["results"]) {
        if (item.is_object() && item.contains("id") && item["id"].is_string()) {
            return strip_prefix(item["id"].get<std::string>(), kOpenAlexPrefix);
        }
    }
    throw ConfigError("no OpenAlex concept matches '" + display_name + "'");
}

}  // namespace digest::ingest
