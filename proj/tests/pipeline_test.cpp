#include "digest/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "digest/cli.hpp"
#include "digest/errors.hpp"
#include "support/paths.hpp"
#include "support/pdf_text.hpp"
#include "support/scripted_transport.hpp"

using namespace digest;
using namespace digest::pipeline;
using digest::testing::fixture_dir;
using digest::testing::TempDir;

namespace {

PipelineConfig fixture_config(const TempDir& dir, const std::string& fixture_set) {
    PipelineConfig cfg;
    cfg.concept_id = "C10138342";
    cfg.provider = ProviderChoice::Mock;
    cfg.output_dir = dir / "out";
    cfg.store_dir = dir / "store";
    cfg.fixture_dir = fixture_dir(fixture_set);
    cfg.rate_limit_rps = 1000.0;
    cfg.retry.initial_delay = std::chrono::milliseconds{5};
    cfg.retry.seed = 3;
    cfg.authors = {"Pipeline Test"};
    return cfg;
}

std::string slurp_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_config_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    out << doc.dump(2);
}

std::string strip_generated_line(const std::string& markdown) {
    std::string out;
    size_t start = 0;
    while (start <= markdown.size()) {
        size_t end = markdown.find('\n', start);
        if (end == std::string::npos) end = markdown.size();
        const std::string line = markdown.substr(start, end - start);
        if (line.rfind("Generated", 0) != 0) out += line + "\n";
        start = end + 1;
    }
    return out;
}

const CalendarDate kSepRunDate = CalendarDate::parse("2024-10-25");  // selects 2024-09

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("run_fetch pulls the fixture window into the store") {
    TempDir dir;
    Pipeline pipeline(fixture_config(dir, "openalex_sep2024"));
    const auto outcome = pipeline.run_fetch(kSepRunDate);
    CHECK(outcome.window == DateWindow::for_month(2024, 9));
    CHECK(outcome.fetched == 450);
    CHECK(outcome.inserted == 450);
    CHECK(outcome.replaced == 0);

    // Refetch replaces every record.
    Pipeline again(fixture_config(dir, "openalex_sep2024"));
    const auto second = again.run_fetch(kSepRunDate);
    CHECK(second.inserted == 0);
    CHECK(second.replaced == 450);
}

TEST_CASE("run_fetch with an empty window stores nothing") {
    TempDir dir;
    Pipeline pipeline(fixture_config(dir, "openalex_empty"));
    const auto outcome = pipeline.run_fetch(CalendarDate::parse("2024-12-25"));
    CHECK(outcome.window == DateWindow::for_month(2024, 11));
    CHECK(outcome.fetched == 0);
}

TEST_CASE("generate with the mock provider writes four section files") {
    TempDir dir;
    auto cfg = fixture_config(dir, "openalex_small");
    Pipeline pipeline(cfg);
    pipeline.run_fetch(kSepRunDate);

    const auto window = DateWindow::for_month(2024, 9);
    const auto outcome = pipeline.run_generate(window);
    REQUIRE(outcome.sections.size() == 4);
    for (const auto& s : outcome.sections) {
        CHECK(s.chunks == 1);
        CHECK(s.attempts == 1);
        CHECK_FALSE(s.cached);
    }
    for (prompts::SectionKind kind : prompts::kAllKinds) {
        const auto file = pipeline.section_file(window, kind);
        REQUIRE(std::filesystem::is_regular_file(file));
        const auto doc = nlohmann::json::parse(slurp_file(file));
        CHECK(doc["body"].get<std::string>().rfind("[MOCK", 0) == 0);
        CHECK(doc["period"] == "2024-09");
    }
}

TEST_CASE("generate resumes from completed section files") {
    TempDir dir;
    Pipeline pipeline(fixture_config(dir, "openalex_small"));
    pipeline.run_fetch(kSepRunDate);
    const auto window = DateWindow::for_month(2024, 9);
    pipeline.run_generate(window);

    // Tamper with one section; a rerun must keep it instead of regenerating.
    const auto file = pipeline.section_file(window, prompts::SectionKind::Themes);
    auto doc = nlohmann::json::parse(slurp_file(file));
    doc["body"] = "hand-edited body";
    std::ofstream(file) << doc.dump();

    const auto outcome = pipeline.run_generate(window);
    size_t cached = 0;
    for (const auto& s : outcome.sections) {
        if (s.cached) ++cached;
    }
    CHECK(cached == 4);
    CHECK(nlohmann::json::parse(slurp_file(file))["body"] == "hand-edited body");
}

TEST_CASE("a tight budget fans out into chunks and merges the partials") {
    TempDir dir;
    auto cfg = fixture_config(dir, "openalex_small");
    cfg.budget.max_tokens_per_request = 150;  // forces more than one chunk for 3 articles
    Pipeline pipeline(cfg);
    pipeline.run_fetch(kSepRunDate);

    const auto window = DateWindow::for_month(2024, 9);
    const auto outcome = pipeline.run_generate(window);
    for (const auto& s : outcome.sections) {
        CHECK(s.chunks >= 2);
        CHECK(s.attempts >= s.chunks + 1);  // chunk calls plus the merge call
    }
    const auto body = nlohmann::json::parse(slurp_file(
        pipeline.section_file(window, prompts::SectionKind::KeyFindings)))["body"]
                          .get<std::string>();
    CHECK(body.rfind("[MOCK MERGE] parts=", 0) == 0);
    CHECK(pipeline.run_render(window).filename().string() == "FinancialDigest_2024_09.pdf");
}

TEST_CASE("extractive-only provider fills KeyFindings and stubs the rest") {
    TempDir dir;
    auto cfg = fixture_config(dir, "openalex_small");
    cfg.provider = ProviderChoice::ExtractiveOnly;
    Pipeline pipeline(cfg);
    pipeline.run_fetch(kSepRunDate);
    const auto window = DateWindow::for_month(2024, 9);
    pipeline.run_generate(window);

    const auto key = nlohmann::json::parse(
        slurp_file(pipeline.section_file(window, prompts::SectionKind::KeyFindings)));
    CHECK(key["body"].get<std::string>().rfind("[MOCK", 0) == std::string::npos);
    CHECK_FALSE(key["body"].get<std::string>().empty());

    const auto themes = nlohmann::json::parse(
        slurp_file(pipeline.section_file(window, prompts::SectionKind::Themes)));
    CHECK(themes["body"].get<std::string>().find("requires an LLM provider") !=
          std::string::npos);
}

TEST_CASE("generate against a persistently rate-limited live endpoint fails") {
    TempDir dir;
    auto cfg = fixture_config(dir, "openalex_small");
    cfg.provider = ProviderChoice::Live;
    setenv("GEMINI_API_KEY", "dummy-key", 1);
    Pipeline pipeline(cfg);
    pipeline.run_fetch(kSepRunDate);
    CHECK_THROWS_AS(pipeline.run_generate(DateWindow::for_month(2024, 9)), llm::ProviderError);
}

TEST_CASE("live provider without the API key is a config error before any call") {
    TempDir dir;
    auto cfg = fixture_config(dir, "openalex_small");
    cfg.provider = ProviderChoice::Live;
    unsetenv("GEMINI_API_KEY");
    Pipeline pipeline(cfg);
    pipeline.run_fetch(kSepRunDate);
    CHECK_THROWS_AS(pipeline.run_generate(DateWindow::for_month(2024, 9)), ConfigError);
}

TEST_CASE("render produces the digest pair and is reproducible") {
    TempDir dir;
    Pipeline pipeline(fixture_config(dir, "openalex_small"));
    pipeline.run_fetch(kSepRunDate);
    const auto window = DateWindow::for_month(2024, 9);
    pipeline.run_generate(window);

    const auto pdf = pipeline.run_render(window);
    CHECK(pdf.filename().string() == "FinancialDigest_2024_09.pdf");
    const auto md_path = pdf.parent_path() / "FinancialDigest_2024_09.md";
    REQUIRE(std::filesystem::is_regular_file(md_path));
    const auto first = slurp_file(md_path);

    pipeline.run_render(window);
    const auto second = slurp_file(md_path);
    CHECK(strip_generated_line(first) == strip_generated_line(second));
}

TEST_CASE("render without section files names the missing kind") {
    TempDir dir;
    Pipeline pipeline(fixture_config(dir, "openalex_small"));
    pipeline.run_fetch(kSepRunDate);
    CHECK_THROWS_WITH_AS(pipeline.run_render(DateWindow::for_month(2024, 9)),
                         doctest::Contains("KeyFindings"), MissingSectionError);
}

TEST_CASE("run_all equals the three stages run individually") {
    TempDir dir_all;
    TempDir dir_stages;

    Pipeline all(fixture_config(dir_all, "openalex_small"));
    const auto outcome = all.run_all(kSepRunDate);

    Pipeline staged(fixture_config(dir_stages, "openalex_small"));
    const auto fetch = staged.run_fetch(kSepRunDate);
    staged.run_generate(fetch.window);
    const auto pdf = staged.run_render(fetch.window);

    const auto md_all =
        slurp_file(outcome.pdf_path.parent_path() / "FinancialDigest_2024_09.md");
    const auto md_staged = slurp_file(pdf.parent_path() / "FinancialDigest_2024_09.md");
    CHECK(strip_generated_line(md_all) == strip_generated_line(md_staged));
}

TEST_CASE("debug flag writes payload files") {
    TempDir dir;
    auto cfg = fixture_config(dir, "openalex_small");
    cfg.debug_payloads = true;
    Pipeline pipeline(cfg);
    pipeline.run_fetch(kSepRunDate);
    pipeline.run_generate(DateWindow::for_month(2024, 9));
    CHECK(std::filesystem::is_regular_file(cfg.output_dir / "payload_2024_09_0.json"));
}

TEST_CASE("resolve_concept caches the lookup") {
    TempDir dir;
    Pipeline pipeline(fixture_config(dir, "concepts"));
    CHECK(pipeline.resolve_concept("finance") == "C10138342");

    // Second resolution must come from the cache: a transport with no
    // recorded responses would throw if queried.
    auto cfg = fixture_config(dir, "concepts");
    auto empty_transport = std::make_shared<digest::testing::ScriptedTransport>(
        std::vector<HttpResponse>{});
    Pipeline cached(cfg, empty_transport);
    CHECK(cached.resolve_concept("finance") == "C10138342");
    CHECK(empty_transport->call_count() == 0);
}

TEST_CASE("load_config reads fields and validates paths") {
    TempDir dir;
    const auto path = dir / "config.json";
    write_config_file(path, {
        {"concept_id", "C10138342"},
        {"lag_days", 14},
        {"provider", "extractive-only"},
        {"digest_title", "My Digest"},
        {"authors", {"A", "B"}},
        {"budget", {{"max_tokens_per_request", 1234}, {"chars_per_token", 3.5}}},
        {"retry", {{"max_attempts", 2}, {"initial_delay_ms", 10}}},
        {"jitter_seed", 42},
    });
    const auto cfg = load_config(path);
    CHECK(cfg.concept_id == "C10138342");
    CHECK(cfg.lag_days == 14);
    CHECK(cfg.provider == ProviderChoice::ExtractiveOnly);
    CHECK(cfg.digest_title == "My Digest");
    CHECK(cfg.authors == std::vector<std::string>{"A", "B"});
    CHECK(cfg.budget.max_tokens_per_request == 1234);
    CHECK(cfg.budget.chars_per_token == doctest::Approx(3.5));
    CHECK(cfg.retry.max_attempts == 2);
    CHECK(cfg.retry.seed == 42);

    SUBCASE("relative paths resolve against the config directory") {
        write_config_file(path, {{"store_dir", "deep/store"}});
        CHECK(load_config(path).store_dir == dir.path() / "deep/store");
    }
    SUBCASE("bad JSON is a config error") {
        std::ofstream(path, std::ios::trunc) << "{ not json";
        CHECK_THROWS_AS(load_config(path), ConfigError);
    }
    SUBCASE("missing referenced files are config errors") {
        write_config_file(path, {{"template_overrides", "nope.json"}});
        CHECK_THROWS_AS(load_config(path), ConfigError);
        write_config_file(path, {{"stopword_file", "nope.txt"}});
        CHECK_THROWS_AS(load_config(path), ConfigError);
        write_config_file(path, {{"fixture_dir", "nope"}});
        CHECK_THROWS_AS(load_config(path), ConfigError);
    }
    SUBCASE("bad provider name is a config error") {
        write_config_file(path, {{"provider", "psychic"}});
        CHECK_THROWS_AS(load_config(path), ConfigError);
    }
}

TEST_CASE("cli fetch prints the window range and stored count") {
    TempDir dir;
    const auto config_path = dir / "config.json";
    write_config_file(config_path, {
        {"concept_id", "C10138342"},
        {"provider", "mock"},
        {"output_dir", (dir / "out").string()},
        {"store_dir", (dir / "store").string()},
        {"fixture_dir", fixture_dir("openalex_sep2024").string()},
        {"rate_limit_rps", 1000.0},
    });

    std::ostringstream captured;
    auto* previous = std::cout.rdbuf(captured.rdbuf());
    const int exit_code =
        cli::run({"--config", config_path.string(), "--run-date", "2024-10-25", "fetch"});
    std::cout.rdbuf(previous);

    CHECK(exit_code == cli::kOk);
    CHECK(captured.str().find("2024-09-01..2024-09-30") != std::string::npos);
    CHECK(captured.str().find("450") != std::string::npos);
}

TEST_CASE("cli maps stages to exit codes") {
    TempDir dir;
    const auto config_path = dir / "config.json";
    write_config_file(config_path, {
        {"concept_id", "C10138342"},
        {"provider", "mock"},
        {"output_dir", (dir / "out").string()},
        {"store_dir", (dir / "store").string()},
        {"fixture_dir", fixture_dir("openalex_small").string()},
        {"rate_limit_rps", 1000.0},
        {"retry", {{"initial_delay_ms", 5}}},
    });

    SUBCASE("fetch, generate, render, run all succeed") {
        CHECK(cli::run({"--config", config_path.string(), "--run-date", "2024-10-25", "fetch"}) ==
              cli::kOk);
        CHECK(cli::run({"--config", config_path.string(), "--window", "2024-09", "generate"}) ==
              cli::kOk);
        CHECK(cli::run({"--config", config_path.string(), "--window", "2024-09", "render"}) ==
              cli::kOk);
        CHECK(cli::run({"--config", config_path.string(), "--run-date", "2024-10-25", "run"}) ==
              cli::kOk);
        CHECK(std::filesystem::is_regular_file(dir / "out" / "FinancialDigest_2024_09.pdf"));
    }
    SUBCASE("missing config file exits 1") {
        CHECK(cli::run({"--config", (dir / "missing.json").string(), "fetch"}) ==
              cli::kConfigError);
    }
    SUBCASE("unknown subcommand exits 1") {
        CHECK(cli::run({"frobnicate"}) == cli::kConfigError);
    }
    SUBCASE("unreachable endpoint (no recorded fixture) exits 2") {
        // Window 2024-08 has no recorded response in the fixture set.
        CHECK(cli::run({"--config", config_path.string(), "--run-date", "2024-09-25", "fetch"}) ==
              cli::kIngestError);
    }
    SUBCASE("provider failure exits 3") {
        setenv("GEMINI_API_KEY", "dummy-key", 1);
        CHECK(cli::run({"--config", config_path.string(), "--run-date", "2024-10-25", "fetch"}) ==
              cli::kOk);
        CHECK(cli::run({"--config", config_path.string(), "--window", "2024-09", "--provider",
                        "live", "generate"}) == cli::kProviderError);
    }
    SUBCASE("render before generate exits 4") {
        CHECK(cli::run({"--config", config_path.string(), "--window", "2024-09", "render"}) ==
              cli::kRenderError);
    }
    SUBCASE("resolve-concept prints the cached id") {
        write_config_file(config_path, {
            {"store_dir", (dir / "store").string()},
            {"output_dir", (dir / "out").string()},
            {"fixture_dir", fixture_dir("concepts").string()},
        });
        CHECK(cli::run({"--config", config_path.string(), "resolve-concept", "finance"}) ==
              cli::kOk);
    }
}

}  // TEST_SUITE
