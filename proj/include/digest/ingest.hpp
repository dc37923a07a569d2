#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "digest/dates.hpp"
#include "digest/http.hpp"
#include "digest/rate_limit.hpp"
#include "digest/retry.hpp"

namespace digest::ingest {

struct WorkQuery {
    DateWindow window;
    std::string concept_id;  // bare OpenAlex concept id, e.g. "C10138342"
    int per_page = 200;      // API maximum
    std::string cursor = "*";
    std::optional<std::string> contact_email;
};

// Token -> positions, in the order the mapping was serialized. OpenAlex
// delivers abstracts in this inverted form.
using InvertedAbstract = std::vector<std::pair<std::string, std::vector<int>>>;

struct ReconstructionStats {
    int duplicate_positions = 0;  // positions claimed by more than one token
    int repaired_entries = 0;     // lists that needed sorting or pruning
};

// Places each token at its positions (ascending) joined by single spaces.
// Position gaps collapse; when two tokens claim one position the token that
// appears first in serialized order wins and the repair is counted.
std::string reconstruct_abstract(const InvertedAbstract& inv, ReconstructionStats* stats = nullptr);

// Parses the raw JSON mapping, repairing unsorted lists and dropping
// empty/negative entries.
InvertedAbstract inverted_abstract_from_json(const nlohmann::ordered_json& obj,
                                             ReconstructionStats* stats = nullptr);

struct WorkRecord {
    std::string id;                   // full OpenAlex work URI
    std::optional<std::string> doi;   // bare DOI ("10.xxxx/...")
    std::string title;
    CalendarDate publication_date;
    std::string abstract_text;        // possibly empty
    std::vector<std::string> concepts;  // bare concept ids
    std::string fetched_at;           // ISO-8601 UTC

    bool operator==(const WorkRecord&) const = default;
};

struct FetchPage {
    std::vector<WorkRecord> records;
    std::optional<std::string> next_cursor;  // absent on the final page
    long total_count = 0;
};

// Deterministic query URL; clause order is fixed so fixtures can match exactly.
std::string build_query_url(const WorkQuery& query, const std::string& base_url);

struct ClientOptions {
    std::string works_url = "https://api.openalex.org/works";
    std::string concepts_url = "https://api.openalex.org/concepts";
    int per_page = 200;
    double rate_limit_rps = 5.0;
    std::optional<std::string> contact_email;
    RetryPolicy retry;
};

class OpenAlexClient {
public:
    OpenAlexClient(std::shared_ptr<HttpTransport> transport, ClientOptions options);

    // One page of normalized records. Retries 429/5xx/transport failures per
    // the backoff policy; all requests go through the shared rate limiter.
    FetchPage fetch_page(const WorkQuery& query);

    // Drives cursor pagination to the end; duplicate ids keep the first
    // occurrence. Fetch errors are rethrown with the failing page attached.
    std::vector<WorkRecord> fetch_all(const DateWindow& window, const std::string& concept_id);

    // Resolves a field-of-study display name to a bare concept id.
    std::string resolve_concept(const std::string& display_name);

    const ClientOptions& options() const { return options_; }

private:
    HttpResponse get_with_retries(const std::string& url);

    std::shared_ptr<HttpTransport> transport_;
    ClientOptions options_;
    RateLimiter limiter_;
    Backoff backoff_;
};

// Maps one raw OpenAlex work object to a WorkRecord. Returns nothing when the
// record is unusable (missing id or unparseable date).
std::optional<WorkRecord> normalize_work(const nlohmann::ordered_json& raw,
                                         const std::string& fetched_at,
                                         ReconstructionStats* stats = nullptr);

}  // namespace digest::ingest
