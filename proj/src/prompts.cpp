#include "digest/prompts.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "digest/errors.hpp"

namespace digest::prompts {

namespace {

constexpr std::string_view kKeyFindingsText =
    "Summarize the key findings in all abstract parts of this article from the provided "
    "research articles. Please describe widely and cite most interesting.";

constexpr std::string_view kThemesText =
    "What are the main themes or trends emerging from these articles? Take into account only "
    "abstracts (values)";

constexpr std::string_view kConnectionsText =
    "Can you identify any commonalities or connections between the different research papers?";

constexpr std::string_view kFutureDirectionsText =
    "What are the major implications for future directions suggested by this research? "
    "Describe future possibilities.";

const std::string kMergeText =
    "Merge the following partial analyses into one coherent section, removing duplicates.";

std::string_view default_text(SectionKind kind) {
    switch (kind) {
        case SectionKind::KeyFindings: return kKeyFindingsText;
        case SectionKind::Themes: return kThemesText;
        case SectionKind::Connections: return kConnectionsText;
        case SectionKind::FutureDirections: return kFutureDirectionsText;
    }
    throw std::logic_error("unknown section kind");
}

}  // namespace

std::string_view kind_name(SectionKind kind) {
    switch (kind) {
        case SectionKind::KeyFindings: return "KeyFindings";
        case SectionKind::Themes: return "Themes";
        case SectionKind::Connections: return "Connections";
        case SectionKind::FutureDirections: return "FutureDirections";
    }
    throw std::logic_error("unknown section kind");
}

std::optional<SectionKind> kind_from_name(std::string_view name) {
    for (SectionKind kind : kAllKinds) {
        if (kind_name(kind) == name) return kind;
    }
    return std::nullopt;
}

std::string_view section_heading(SectionKind kind) {
    switch (kind) {
        case SectionKind::KeyFindings: return "Key Findings";
        case SectionKind::Themes: return "Themes and Emerging Trends";
        case SectionKind::Connections: return "Connections Across Papers";
        case SectionKind::FutureDirections: return "Implications and Future Directions";
    }
    throw std::logic_error("unknown section kind");
}

PromptTemplate default_template(SectionKind kind) {
    return PromptTemplate{kind, std::string(default_text(kind)), "v1"};
}

const std::string& merge_instruction() { return kMergeText; }

RenderedPrompt render(const PromptTemplate& tmpl, const std::string& payload_json,
                      int chunk_index, int chunk_total) {
    if (payload_json.empty()) throw std::invalid_argument("payload_json must not be empty");
    if (tmpl.instruction_text.empty()) throw std::invalid_argument("instruction_text must not be empty");
    RenderedPrompt out;
    out.kind = tmpl.kind;
    out.full_text = tmpl.instruction_text + "\n\n" + payload_json;
    out.chunk_index = chunk_index;
    out.chunk_total = chunk_total;
    return out;
}

std::string render_merge(const std::vector<std::string>& partial_bodies) {
    std::string text = kMergeText + "\n\n";
    for (size_t i = 0; i < partial_bodies.size(); ++i) {
        if (i > 0) text += kMergePartSeparator;
        text += partial_bodies[i];
    }
    return text;
}

TemplateOverrides load_template_overrides(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open template override file " + path.string());
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("template override file must hold a JSON object: " + path.string());
    }
    TemplateOverrides overrides;
    for (const auto& [key, value] : doc.items()) {
        const auto kind = kind_from_name(key);
        if (!kind) throw ConfigError("unknown section kind in overrides: '" + key + "'");
        if (!value.is_string() || value.get<std::string>().empty()) {
            throw ConfigError("override for '" + key + "' must be a non-empty string");
        }
        overrides[*kind] = value.get<std::string>();
    }
    return overrides;
}

PromptTemplate template_for(SectionKind kind, const TemplateOverrides& overrides) {
    auto it = overrides.find(kind);
    if (it == overrides.end()) return default_template(kind);
    return PromptTemplate{kind, it->second, "override"};
}

}  // namespace digest::prompts
