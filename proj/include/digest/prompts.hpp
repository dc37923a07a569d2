#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace digest::prompts {

// The four analysis sections of the digest, in report order.
enum class SectionKind { KeyFindings, Themes, Connections, FutureDirections };

inline constexpr std::array<SectionKind, 4> kAllKinds = {
    SectionKind::KeyFindings, SectionKind::Themes, SectionKind::Connections,
    SectionKind::FutureDirections};

std::string_view kind_name(SectionKind kind);  // "KeyFindings", ...
std::optional<SectionKind> kind_from_name(std::string_view name);
std::string_view section_heading(SectionKind kind);  // report heading text

struct PromptTemplate {
    SectionKind kind;
    std::string instruction_text;
    std::string version_tag;
};

struct RenderedPrompt {
    SectionKind kind;
    std::string full_text;  // instruction + blank line + payload JSON
    int chunk_index = 0;
    int chunk_total = 1;
};

// Stock instruction text for each section.
PromptTemplate default_template(SectionKind kind);

// Internal reduce step used when a window needs more than one payload chunk.
const std::string& merge_instruction();

RenderedPrompt render(const PromptTemplate& tmpl, const std::string& payload_json,
                      int chunk_index = 0, int chunk_total = 1);

// Prompt that combines per-chunk partial analyses into one section body.
std::string render_merge(const std::vector<std::string>& partial_bodies);
constexpr std::string_view kMergePartSeparator = "\n\n---\n\n";

using TemplateOverrides = std::map<SectionKind, std::string>;

// JSON object mapping kind name -> instruction text.
TemplateOverrides load_template_overrides(const std::filesystem::path& path);

PromptTemplate template_for(SectionKind kind, const TemplateOverrides& overrides);

}  // namespace digest::prompts
