#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "digest/prompts.hpp"

namespace digest::report {

struct DigestSection {
    prompts::SectionKind kind;
    std::string heading;  // canonicalized by assemble() when empty
    std::string body;
    int contributing_chunks = 1;
};

struct SourceEntry {
    std::string title;
    std::string doi;  // "n/a" when the work has none
    std::string work_id;
};

struct DocumentMeta {
    std::string title;
    std::string period_label;  // "YYYY-MM"
    std::vector<std::string> authors;
    std::string generated_at;  // ISO-8601 UTC
};

// Full report model: metadata, the four sections in fixed kind order, and the
// source listing in corpus canonical order.
struct DigestDocument {
    DocumentMeta meta;
    std::array<DigestSection, 4> sections;
    std::vector<SourceEntry> sources;
};

// Extension point for content injected after a section's body (e.g. chart
// blocks); returns extra paragraph lines.
using RenderHook = std::function<std::vector<std::string>(const DigestSection&)>;

// Validates and normalizes: each kind exactly once, fixed order, non-empty
// bodies. Sources may be empty only for an empty corpus.
DigestDocument assemble(std::vector<DigestSection> sections, std::vector<SourceEntry> sources,
                        DocumentMeta meta);

// Deterministic layout: H1 title, metadata block, contents list, one H2 per
// section, and a numbered "Sources" H2.
std::string render_markdown(const DigestDocument& doc, const RenderHook* hook = nullptr);

// Writes FinancialDigest_<YYYY>_<MM>.pdf under out_dir: title page, contents
// page, one page run per section, sources, centered page numbers after the
// title page. Returns the file path.
std::filesystem::path render_pdf(const DigestDocument& doc, const std::filesystem::path& out_dir,
                                 const RenderHook* hook = nullptr);

// "FinancialDigest_<YYYY>_<MM>" with zero-padded month.
std::string digest_basename(const std::string& period_label);

}  // namespace digest::report
