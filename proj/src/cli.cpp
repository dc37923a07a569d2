#include "digest/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "digest/dates.hpp"
#include "digest/errors.hpp"
#include "digest/llm.hpp"
#include "digest/pipeline.hpp"

namespace digest::cli {

namespace {

using pipeline::Pipeline;
using pipeline::PipelineConfig;

struct GlobalArgs {
    std::string config_path;
    std::string run_date;
    std::string window;
    std::string provider;
    bool debug_payloads = false;
};

PipelineConfig make_config(const GlobalArgs& args) {
    PipelineConfig cfg =
        args.config_path.empty() ? PipelineConfig{} : pipeline::load_config(args.config_path);
    if (!args.provider.empty()) cfg.provider = pipeline::provider_from_name(args.provider);
    if (args.debug_payloads) cfg.debug_payloads = true;
    return cfg;
}

std::optional<CalendarDate> parse_run_date(const GlobalArgs& args) {
    if (args.run_date.empty()) return std::nullopt;
    try {
        return CalendarDate::parse(args.run_date);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad --run-date: ") + e.what());
    }
}

DateWindow window_for(const GlobalArgs& args, const Pipeline& pipeline) {
    if (!args.window.empty()) {
        try {
            return DateWindow::parse_month(args.window);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bad --window: ") + e.what());
        }
    }
    return pipeline.window_for(parse_run_date(args));
}

void print_fetch(const pipeline::FetchOutcome& outcome) {
    std::cout << "window " << outcome.window.start.to_string() << ".."
              << outcome.window.end.to_string() << " fetched " << outcome.fetched << " stored "
              << (outcome.inserted + outcome.replaced) << " (inserted " << outcome.inserted
              << ", replaced " << outcome.replaced << ")\n";
}

void print_generate(const pipeline::GenerateOutcome& outcome) {
    for (const auto& section : outcome.sections) {
        std::cout << "section " << prompts::kind_name(section.kind) << " chunks " << section.chunks
                  << " attempts " << section.attempts << (section.cached ? " (cached)" : "")
                  << "\n";
    }
}

int dispatch(const GlobalArgs& args, const std::string& command,
             const std::string& concept_name) {
    PipelineConfig cfg = make_config(args);
    Pipeline pipeline(std::move(cfg));

    if (command == "fetch") {
        print_fetch(pipeline.run_fetch(parse_run_date(args)));
    } else if (command == "generate") {
        print_generate(pipeline.run_generate(window_for(args, pipeline)));
    } else if (command == "render") {
        std::cout << pipeline.run_render(window_for(args, pipeline)).string() << "\n";
    } else if (command == "run") {
        const auto outcome = pipeline.run_all(parse_run_date(args));
        print_fetch(outcome.fetch);
        print_generate(outcome.generate);
        std::cout << outcome.pdf_path.string() << "\n";
    } else if (command == "resolve-concept") {
        std::cout << pipeline.resolve_concept(concept_name) << "\n";
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Monthly research digest pipeline (OpenAlex -> LLM -> PDF)"};
    app.require_subcommand(1);

    GlobalArgs global;
    app.add_option("--config", global.config_path, "Path to the JSON config file");
    app.add_option("--run-date", global.run_date, "Override today's date (YYYY-MM-DD)");
    app.add_option("--window", global.window, "Target month (YYYY-MM)");
    app.add_option("--provider", global.provider, "live, mock or extractive-only");
    app.add_flag("--debug-payloads", global.debug_payloads, "Write payload JSON files");

    app.add_subcommand("fetch", "Fetch the window's works into the corpus store");
    app.add_subcommand("generate", "Run the four analysis prompts over the window's corpus");
    app.add_subcommand("render", "Assemble and write the PDF + Markdown digest");
    app.add_subcommand("run", "fetch, generate and render in sequence");
    std::string concept_name;
    app.add_subcommand("resolve-concept", "Look up a field-of-study concept id by name")
        ->add_option("name", concept_name, "Concept display name, e.g. \"finance\"")
        ->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        return dispatch(global, app.get_subcommands().front()->get_name(), concept_name);
    } catch (const ConfigError& e) {
        std::cerr << "error [config]: " << e.what() << "\n";
        return kConfigError;
    } catch (const llm::ProviderError& e) {
        std::cerr << "error [provider]: " << e.what() << "\n";
        return kProviderError;
    } catch (const MissingSectionError& e) {
        std::cerr << "error [render]: " << e.what() << "\n";
        return kRenderError;
    } catch (const DuplicateSectionError& e) {
        std::cerr << "error [render]: " << e.what() << "\n";
        return kRenderError;
    } catch (const RenderError& e) {
        std::cerr << "error [render]: " << e.what() << "\n";
        return kRenderError;
    } catch (const Error& e) {
        // Remaining taxonomy: transport, auth, rate-limit, storage, payload.
        std::cerr << "error [ingest]: " << e.what() << "\n";
        return kIngestError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace digest::cli
