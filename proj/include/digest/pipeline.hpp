#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "digest/dates.hpp"
#include "digest/ingest.hpp"
#include "digest/llm.hpp"
#include "digest/payload.hpp"
#include "digest/prompts.hpp"
#include "digest/store.hpp"

namespace digest::pipeline {

enum class ProviderChoice { Live, Mock, ExtractiveOnly };

ProviderChoice provider_from_name(const std::string& name);  // "live"|"mock"|"extractive-only"
std::string_view provider_name(ProviderChoice choice);

struct PipelineConfig {
    std::string concept_id;
    int lag_days = 21;
    payload::TokenBudget budget;
    ProviderChoice provider = ProviderChoice::Mock;
    double rate_limit_rps = 5.0;
    std::optional<std::string> contact_email;
    std::filesystem::path output_dir = "out";
    std::filesystem::path store_dir = "store";
    std::optional<std::filesystem::path> template_overrides;
    std::optional<std::filesystem::path> stopword_file;
    std::string model_name = "gemini-1.5-pro";
    double temperature = 0.3;
    int max_output_tokens = 4096;
    std::string digest_title = "Financial Research Digest";
    std::vector<std::string> authors;
    std::string openalex_works_url = "https://api.openalex.org/works";
    std::string openalex_concepts_url = "https://api.openalex.org/concepts";
    std::string gemini_base_url = "https://generativelanguage.googleapis.com";
    RetryPolicy retry;
    int summary_top_k = 5;
    bool debug_payloads = false;
    // When set, both transports replay recorded responses from this directory
    // instead of touching the network.
    std::optional<std::filesystem::path> fixture_dir;
};

// Reads the JSON config file and validates referenced paths.
PipelineConfig load_config(const std::filesystem::path& path);

struct FetchOutcome {
    DateWindow window;
    size_t fetched = 0;
    int inserted = 0;
    int replaced = 0;
};

struct SectionOutcome {
    prompts::SectionKind kind;
    int chunks = 0;
    int attempts = 0;
    bool cached = false;  // body reused from a previous run
};

struct GenerateOutcome {
    DateWindow window;
    std::vector<SectionOutcome> sections;
};

struct RunOutcome {
    FetchOutcome fetch;
    GenerateOutcome generate;
    std::filesystem::path pdf_path;
};

// Wires the modules into the three-stage digest pipeline. Transports and the
// completion provider are injectable; by default they are built from the
// config (replay transports when fixture_dir is set).
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config,
                      std::shared_ptr<HttpTransport> openalex_transport = nullptr,
                      std::shared_ptr<llm::CompletionProvider> provider = nullptr);

    // Window computation, full fetch, store upsert.
    FetchOutcome run_fetch(std::optional<CalendarDate> run_date = std::nullopt);

    // Payload build, four prompt kinds (chunk fan-out plus merge), persisted
    // section bodies. Completed sections are kept on disk and reused.
    GenerateOutcome run_generate(const DateWindow& window);

    // Assembles the document from the persisted sections and writes PDF +
    // Markdown.
    std::filesystem::path run_render(const DateWindow& window);

    RunOutcome run_all(std::optional<CalendarDate> run_date = std::nullopt);

    std::string resolve_concept(const std::string& display_name);

    DateWindow window_for(std::optional<CalendarDate> run_date) const;
    std::filesystem::path section_file(const DateWindow& window, prompts::SectionKind kind) const;

    const PipelineConfig& config() const { return config_; }

private:
    std::shared_ptr<HttpTransport> openalex_transport();
    std::shared_ptr<llm::CompletionProvider> provider();
    ingest::OpenAlexClient make_client();
    std::filesystem::path work_dir(const DateWindow& window) const;

    PipelineConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<llm::CompletionProvider> provider_;
    store::JsonlStore store_;
};

}  // namespace digest::pipeline
