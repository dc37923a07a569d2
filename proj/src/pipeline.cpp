#include "digest/pipeline.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <future>

#include <json.hpp>

#include "digest/document.hpp"
#include "digest/extractive.hpp"

namespace digest::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kNoProviderNotice =
    "This section requires an LLM provider; rerun with provider \"mock\" or \"live\".";

constexpr const char* kEmptyCorpusNotice = "No abstracts were available for this period.";

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw StorageError("write failed for " + path.string());
}

struct SectionBody {
    std::string body;
    int chunks = 1;
    int attempts = 0;
};

}  // namespace

ProviderChoice provider_from_name(const std::string& name) {
    if (name == "live") return ProviderChoice::Live;
    if (name == "mock") return ProviderChoice::Mock;
    if (name == "extractive-only") return ProviderChoice::ExtractiveOnly;
    throw ConfigError("unknown provider '" + name + "' (expected live, mock or extractive-only)");
}

std::string_view provider_name(ProviderChoice choice) {
    switch (choice) {
        case ProviderChoice::Live: return "live";
        case ProviderChoice::Mock: return "mock";
        case ProviderChoice::ExtractiveOnly: return "extractive-only";
    }
    return "unknown";
}

PipelineConfig load_config(const fs::path& path) {
    const auto doc = nlohmann::json::parse(slurp(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("config file is not a JSON object: " + path.string());
    }

    PipelineConfig cfg;
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    auto resolve = [&base](const std::string& p) {
        const fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    try {
        if (doc.contains("concept_id")) cfg.concept_id = doc["concept_id"].get<std::string>();
        if (doc.contains("lag_days")) cfg.lag_days = doc["lag_days"].get<int>();
        if (doc.contains("provider")) {
            cfg.provider = provider_from_name(doc["provider"].get<std::string>());
        }
        if (doc.contains("rate_limit_rps")) cfg.rate_limit_rps = doc["rate_limit_rps"].get<double>();
        if (doc.contains("contact_email")) cfg.contact_email = doc["contact_email"].get<std::string>();
        if (doc.contains("output_dir")) cfg.output_dir = resolve(doc["output_dir"].get<std::string>());
        if (doc.contains("store_dir")) cfg.store_dir = resolve(doc["store_dir"].get<std::string>());
        if (doc.contains("template_overrides")) {
            cfg.template_overrides = resolve(doc["template_overrides"].get<std::string>());
        }
        if (doc.contains("stopword_file")) {
            cfg.stopword_file = resolve(doc["stopword_file"].get<std::string>());
        }
        if (doc.contains("model_name")) cfg.model_name = doc["model_name"].get<std::string>();
        if (doc.contains("temperature")) cfg.temperature = doc["temperature"].get<double>();
        if (doc.contains("max_output_tokens")) {
            cfg.max_output_tokens = doc["max_output_tokens"].get<int>();
        }
        if (doc.contains("digest_title")) cfg.digest_title = doc["digest_title"].get<std::string>();
        if (doc.contains("authors")) cfg.authors = doc["authors"].get<std::vector<std::string>>();
        if (doc.contains("openalex_works_url")) {
            cfg.openalex_works_url = doc["openalex_works_url"].get<std::string>();
        }
        if (doc.contains("openalex_concepts_url")) {
            cfg.openalex_concepts_url = doc["openalex_concepts_url"].get<std::string>();
        }
        if (doc.contains("gemini_base_url")) {
            cfg.gemini_base_url = doc["gemini_base_url"].get<std::string>();
        }
        if (doc.contains("budget")) {
            const auto& b = doc["budget"];
            if (b.contains("max_tokens_per_request")) {
                cfg.budget.max_tokens_per_request = b["max_tokens_per_request"].get<long>();
            }
            if (b.contains("chars_per_token")) {
                cfg.budget.chars_per_token = b["chars_per_token"].get<double>();
            }
        }
        if (doc.contains("retry")) {
            const auto& r = doc["retry"];
            if (r.contains("max_attempts")) cfg.retry.max_attempts = r["max_attempts"].get<int>();
            if (r.contains("initial_delay_ms")) {
                cfg.retry.initial_delay = std::chrono::milliseconds(r["initial_delay_ms"].get<long>());
            }
            if (r.contains("multiplier")) cfg.retry.multiplier = r["multiplier"].get<double>();
            if (r.contains("jitter")) cfg.retry.jitter = r["jitter"].get<double>();
        }
        if (doc.contains("jitter_seed")) cfg.retry.seed = doc["jitter_seed"].get<std::uint64_t>();
        if (doc.contains("summary_top_k")) cfg.summary_top_k = doc["summary_top_k"].get<int>();
        if (doc.contains("debug_payloads")) cfg.debug_payloads = doc["debug_payloads"].get<bool>();
        if (doc.contains("fixture_dir")) cfg.fixture_dir = resolve(doc["fixture_dir"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config value in " + path.string() + ": " + e.what());
    }

    if (cfg.lag_days < 1) throw ConfigError("lag_days must be >= 1");
    if (cfg.rate_limit_rps <= 0) throw ConfigError("rate_limit_rps must be positive");
    if (cfg.temperature < 0.0 || cfg.temperature > 2.0) {
        throw ConfigError("temperature must be in [0, 2]");
    }
    if (cfg.max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
    if (cfg.budget.max_tokens_per_request < 1 || cfg.budget.chars_per_token <= 0) {
        throw ConfigError("budget fields must be positive");
    }
    if (cfg.summary_top_k < 1) throw ConfigError("summary_top_k must be >= 1");
    if (cfg.template_overrides && !fs::is_regular_file(*cfg.template_overrides)) {
        throw ConfigError("template_overrides file not found: " + cfg.template_overrides->string());
    }
    if (cfg.stopword_file && !fs::is_regular_file(*cfg.stopword_file)) {
        throw ConfigError("stopword_file not found: " + cfg.stopword_file->string());
    }
    if (cfg.fixture_dir && !fs::is_directory(*cfg.fixture_dir)) {
        throw ConfigError("fixture_dir not found: " + cfg.fixture_dir->string());
    }
    return cfg;
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<HttpTransport> openalex_transport,
                   std::shared_ptr<llm::CompletionProvider> provider)
    : config_(std::move(config)),
      transport_(std::move(openalex_transport)),
      provider_(std::move(provider)),
      store_(config_.store_dir) {
    std::error_code ec;
    fs::create_directories(config_.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + config_.output_dir.string());
}

std::shared_ptr<HttpTransport> Pipeline::openalex_transport() {
    if (!transport_) {
        transport_ = config_.fixture_dir
                         ? std::shared_ptr<HttpTransport>(std::make_shared<ReplayTransport>(*config_.fixture_dir))
                         : std::make_shared<LiveTransport>();
    }
    return transport_;
}

std::shared_ptr<llm::CompletionProvider> Pipeline::provider() {
    if (provider_) return provider_;
    switch (config_.provider) {
        case ProviderChoice::Mock:
            provider_ = std::make_shared<llm::MockProvider>();
            break;
        case ProviderChoice::Live: {
            const char* key = std::getenv("GEMINI_API_KEY");
            if (!key || !*key) {
                throw ConfigError("provider 'live' requires the GEMINI_API_KEY environment variable");
            }
            llm::GeminiOptions options;
            options.base_url = config_.gemini_base_url;
            options.api_key = key;
            options.retry = config_.retry;
            provider_ = std::make_shared<llm::GeminiClient>(openalex_transport(), options);
            break;
        }
        case ProviderChoice::ExtractiveOnly:
            throw std::logic_error("extractive-only pipeline has no completion provider");
    }
    return provider_;
}

ingest::OpenAlexClient Pipeline::make_client() {
    ingest::ClientOptions options;
    options.works_url = config_.openalex_works_url;
    options.concepts_url = config_.openalex_concepts_url;
    options.rate_limit_rps = config_.rate_limit_rps;
    options.contact_email = config_.contact_email;
    options.retry = config_.retry;
    return ingest::OpenAlexClient(openalex_transport(), options);
}

DateWindow Pipeline::window_for(std::optional<CalendarDate> run_date) const {
    const CalendarDate date =
        run_date ? *run_date : CalendarDate::parse(utc_now_iso8601().substr(0, 10));
    return compute_window(date, config_.lag_days);
}

fs::path Pipeline::work_dir(const DateWindow& window) const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d_%02d", window.start.year, window.start.month);
    return config_.output_dir / "work" / buf;
}

fs::path Pipeline::section_file(const DateWindow& window, prompts::SectionKind kind) const {
    return work_dir(window) / ("section_" + std::string(prompts::kind_name(kind)) + ".json");
}

FetchOutcome Pipeline::run_fetch(std::optional<CalendarDate> run_date) {
    if (config_.concept_id.empty()) {
        throw ConfigError("concept_id is not configured (use resolve-concept or set it)");
    }
    const DateWindow window = window_for(run_date);
    auto client = make_client();
    const auto records = client.fetch_all(window, config_.concept_id);

    const std::string now = utc_now_iso8601();
    std::vector<store::CorpusEntry> entries;
    entries.reserve(records.size());
    for (const auto& rec : records) entries.push_back({rec, now, window});
    const auto result = store_.upsert(entries);

    return FetchOutcome{window, records.size(), result.inserted, result.replaced};
}

GenerateOutcome Pipeline::run_generate(const DateWindow& window) {
    const auto entries = store_.list_by_window(window);
    std::vector<payload::Article> articles;
    articles.reserve(entries.size());
    for (const auto& entry : entries) articles.push_back(payload::article_from_entry(entry));

    const std::string period = window.period_label();
    const auto payloads = payload::build_payloads(articles, period, config_.budget);

    std::vector<std::string> payload_texts;
    payload_texts.reserve(payloads.size());
    for (const auto& p : payloads) payload_texts.push_back(payload::serialize_payload(p));

    if (config_.debug_payloads) {
        for (size_t i = 0; i < payload_texts.size(); ++i) {
            char name[48];
            std::snprintf(name, sizeof(name), "payload_%04d_%02d_%zu.json", window.start.year,
                          window.start.month, i);
            write_file(config_.output_dir / name, payload_texts[i]);
        }
    }

    std::error_code ec;
    fs::create_directories(work_dir(window), ec);
    if (ec) throw StorageError("cannot create work directory " + work_dir(window).string());

    const prompts::TemplateOverrides overrides =
        config_.template_overrides ? prompts::load_template_overrides(*config_.template_overrides)
                                   : prompts::TemplateOverrides{};

    GenerateOutcome outcome{window, {}};

    // Sections already on disk from a previous run are kept as-is; generation
    // is the costly stage, so completed work survives a partial failure.
    std::vector<prompts::SectionKind> pending;
    for (prompts::SectionKind kind : prompts::kAllKinds) {
        const fs::path file = section_file(window, kind);
        if (fs::is_regular_file(file)) {
            const auto doc = nlohmann::json::parse(slurp(file), nullptr, false);
            if (!doc.is_discarded() && doc.contains("body") && doc["body"].is_string() &&
                !doc["body"].get<std::string>().empty()) {
                outcome.sections.push_back({kind, 0, 0, true});
                continue;
            }
        }
        pending.push_back(kind);
    }

    auto persist = [&](prompts::SectionKind kind, const SectionBody& section) {
        nlohmann::ordered_json doc;
        doc["kind"] = std::string(prompts::kind_name(kind));
        doc["heading"] = std::string(prompts::section_heading(kind));
        doc["body"] = section.body;
        doc["contributing_chunks"] = section.chunks;
        doc["attempts"] = section.attempts;
        doc["period"] = period;
        write_file(section_file(window, kind), doc.dump(2) + "\n");
        outcome.sections.push_back({kind, section.chunks, section.attempts, false});
    };

    if (config_.provider == ProviderChoice::ExtractiveOnly) {
        for (prompts::SectionKind kind : pending) {
            SectionBody section;
            section.chunks = int(payloads.size());
            if (kind == prompts::SectionKind::KeyFindings) {
                extractive::SummaryConfig summary_cfg = extractive::default_config();
                summary_cfg.top_k = config_.summary_top_k;
                if (config_.stopword_file) {
                    summary_cfg.stopwords = extractive::load_stopwords(*config_.stopword_file);
                }
                std::string corpus_text;
                for (const auto& a : articles) {
                    if (a.abstract_text.empty()) continue;
                    if (!corpus_text.empty()) corpus_text += ' ';
                    corpus_text += a.abstract_text;
                }
                section.body = extractive::extract_summary(corpus_text, summary_cfg);
                if (section.body.empty()) section.body = kEmptyCorpusNotice;
            } else {
                section.body = kNoProviderNotice;
            }
            persist(kind, section);
        }
        return outcome;
    }

    auto llm_provider = provider();
    auto generate_section = [&](prompts::SectionKind kind) {
        const prompts::PromptTemplate tmpl = prompts::template_for(kind, overrides);
        SectionBody section;
        section.chunks = int(payload_texts.size());
        std::vector<std::string> partials;
        partials.reserve(payload_texts.size());
        for (size_t i = 0; i < payload_texts.size(); ++i) {
            const auto rendered =
                prompts::render(tmpl, payload_texts[i], int(i), int(payload_texts.size()));
            llm::CompletionRequest request{rendered.full_text, config_.model_name,
                                           config_.max_output_tokens, config_.temperature};
            const auto result = llm_provider->complete(request);
            section.attempts += result.attempts;
            partials.push_back(result.text);
        }
        if (partials.size() == 1) {
            section.body = partials.front();
        } else {
            llm::CompletionRequest request{prompts::render_merge(partials), config_.model_name,
                                           config_.max_output_tokens, config_.temperature};
            const auto result = llm_provider->complete(request);
            section.attempts += result.attempts;
            section.body = result.text;
        }
        return section;
    };

    // One task per section kind; the provider contract allows four in flight.
    std::vector<std::pair<prompts::SectionKind, std::future<SectionBody>>> futures;
    futures.reserve(pending.size());
    for (prompts::SectionKind kind : pending) {
        futures.emplace_back(kind, std::async(std::launch::async, generate_section, kind));
    }

    std::exception_ptr first_error;
    for (auto& [kind, future] : futures) {
        try {
            persist(kind, future.get());
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return outcome;
}

fs::path Pipeline::run_render(const DateWindow& window) {
    std::vector<report::DigestSection> sections;
    for (prompts::SectionKind kind : prompts::kAllKinds) {
        const fs::path file = section_file(window, kind);
        if (!fs::is_regular_file(file)) {
            throw MissingSectionError(std::string(prompts::kind_name(kind)),
                                      "no section file at " + file.string());
        }
        const auto doc = nlohmann::json::parse(slurp(file), nullptr, false);
        if (doc.is_discarded() || !doc.contains("body") || !doc["body"].is_string()) {
            throw MissingSectionError(std::string(prompts::kind_name(kind)),
                                      "unreadable section file " + file.string());
        }
        report::DigestSection section;
        section.kind = kind;
        section.body = doc["body"].get<std::string>();
        if (doc.contains("heading") && doc["heading"].is_string()) {
            section.heading = doc["heading"].get<std::string>();
        }
        if (doc.contains("contributing_chunks") && doc["contributing_chunks"].is_number()) {
            section.contributing_chunks = doc["contributing_chunks"].get<int>();
        }
        sections.push_back(std::move(section));
    }

    std::vector<report::SourceEntry> sources;
    for (const auto& entry : store_.list_by_window(window)) {
        sources.push_back({entry.record.title, entry.record.doi ? *entry.record.doi : "n/a",
                           entry.record.id});
    }

    report::DocumentMeta meta;
    meta.title = config_.digest_title;
    meta.period_label = window.period_label();
    meta.authors = config_.authors;
    meta.generated_at = utc_now_iso8601();

    const auto doc = report::assemble(std::move(sections), std::move(sources), std::move(meta));
    const std::string markdown = report::render_markdown(doc);
    const fs::path md_path =
        config_.output_dir / (report::digest_basename(doc.meta.period_label) + ".md");
    write_file(md_path, markdown);
    return report::render_pdf(doc, config_.output_dir);
}

RunOutcome Pipeline::run_all(std::optional<CalendarDate> run_date) {
    RunOutcome outcome;
    outcome.fetch = run_fetch(run_date);
    outcome.generate = run_generate(outcome.fetch.window);
    outcome.pdf_path = run_render(outcome.fetch.window);
    return outcome;
}

std::string Pipeline::resolve_concept(const std::string& display_name) {
    const fs::path cache_path = config_.store_dir / "concept_cache.json";
    nlohmann::json cache = nlohmann::json::object();
    if (fs::is_regular_file(cache_path)) {
        cache = nlohmann::json::parse(slurp(cache_path), nullptr, false);
        if (cache.is_discarded() || !cache.is_object()) cache = nlohmann::json::object();
        if (cache.contains(display_name) && cache[display_name].is_string()) {
            return cache[display_name].get<std::string>();
        }
    }
    auto client = make_client();
    const std::string id = client.resolve_concept(display_name);
    cache[display_name] = id;
    write_file(cache_path, cache.dump(2) + "\n");
    return id;
}

}  // namespace digest::pipeline
