#include "digest/document.hpp"

#include <fstream>
#include <optional>

#include "digest/dates.hpp"
#include "digest/errors.hpp"
#include "pdf_writer.hpp"

namespace digest::report {

namespace fs = std::filesystem;

namespace {

std::string join_authors(const std::vector<std::string>& authors) {
    if (authors.empty()) return "n/a";
    std::string out;
    for (const auto& a : authors) {
        if (!out.empty()) out += ", ";
        out += a;
    }
    return out;
}

std::string source_line(const SourceEntry& s) { return s.title + " — " + s.doi; }

std::vector<std::string> body_paragraphs(const DigestSection& section, const RenderHook* hook) {
    std::vector<std::string> paragraphs;
    std::string current;
    for (char c : section.body) {
        if (c == '\n') {
            paragraphs.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    paragraphs.push_back(current);
    if (hook && *hook) {
        for (auto& extra : (*hook)(section)) paragraphs.push_back(std::move(extra));
    }
    return paragraphs;
}

// Cursor-based typesetter over PdfWriter: tracks the baseline and breaks pages.
class Typesetter {
public:
    explicit Typesetter(PdfWriter& writer) : writer_(writer) {}

    static constexpr double kMargin = 56.0;
    static constexpr double kBottom = 64.0;

    void new_page() {
        writer_.begin_page();
        y_ = PdfWriter::kPageHeight - kMargin;
    }

    void heading(std::string_view text, double size = 16.0) {
        ensure_room(size * 2.0);
        for (const auto& line : wrap_text(text, chars_for(size))) {
            writer_.show_text(kMargin, y_, PdfWriter::Font::Bold, size, line);
            y_ -= size * 1.4;
        }
        y_ -= size * 0.6;
    }

    void paragraph(std::string_view text, double size = 10.0) {
        if (text.empty()) {
            y_ -= size * 1.4;
            return;
        }
        for (const auto& line : wrap_text(text, chars_for(size))) {
            ensure_room(size * 1.4);
            writer_.show_text(kMargin, y_, PdfWriter::Font::Regular, size, line);
            y_ -= size * 1.4;
        }
        y_ -= size * 0.5;
    }

    void centered(std::string_view text, PdfWriter::Font font, double size, double y) {
        const double width = 0.5 * size * double(text.size());
        writer_.show_text((PdfWriter::kPageWidth - width) / 2.0, y, font, size, text);
    }

private:
    static size_t chars_for(double size) {
        const double usable = PdfWriter::kPageWidth - 2 * kMargin;
        return size_t(usable / (0.5 * size));
    }

    void ensure_room(double needed) {
        if (y_ - needed < kBottom) new_page();
    }

    PdfWriter& writer_;
    double y_ = PdfWriter::kPageHeight - kMargin;
};

}  // namespace

DigestDocument assemble(std::vector<DigestSection> sections, std::vector<SourceEntry> sources,
                        DocumentMeta meta) {
    std::array<std::optional<DigestSection>, 4> slots;
    for (auto& section : sections) {
        const auto index = size_t(section.kind);
        if (slots[index]) {
            throw DuplicateSectionError(std::string(prompts::kind_name(section.kind)));
        }
        if (section.heading.empty()) {
            section.heading = std::string(prompts::section_heading(section.kind));
        }
        slots[index] = std::move(section);
    }

    DigestDocument doc;
    doc.meta = std::move(meta);
    for (prompts::SectionKind kind : prompts::kAllKinds) {
        auto& slot = slots[size_t(kind)];
        const std::string name(prompts::kind_name(kind));
        if (!slot) throw MissingSectionError(name);
        if (slot->body.empty()) throw MissingSectionError(name, "empty body");
        doc.sections[size_t(kind)] = std::move(*slot);
    }
    doc.sources = std::move(sources);
    return doc;
}

std::string render_markdown(const DigestDocument& doc, const RenderHook* hook) {
    std::string md;
    md += "# " + doc.meta.title + "\n\n";
    md += "Period: " + doc.meta.period_label + "\n";
    md += "Authors: " + join_authors(doc.meta.authors) + "\n";
    md += "Generated: " + doc.meta.generated_at + "\n\n";
    md += "Contents\n\n";
    for (size_t i = 0; i < doc.sections.size(); ++i) {
        md += std::to_string(i + 1) + ". " + doc.sections[i].heading + "\n";
    }
    md += "\n";
    for (const auto& section : doc.sections) {
        md += "## " + section.heading + "\n\n";
        for (const auto& paragraph : body_paragraphs(section, hook)) {
            md += paragraph + "\n";
        }
        md += "\n";
    }
    md += "## Sources\n\n";
    for (size_t i = 0; i < doc.sources.size(); ++i) {
        md += std::to_string(i + 1) + ". " + source_line(doc.sources[i]) + "\n";
    }
    return md;
}

std::string digest_basename(const std::string& period_label) {
    const DateWindow window = DateWindow::parse_month(period_label);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "FinancialDigest_%04d_%02d", window.start.year,
                  window.start.month);
    return buf;
}

fs::path render_pdf(const DigestDocument& doc, const fs::path& out_dir, const RenderHook* hook) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw RenderError("cannot create output directory " + out_dir.string());
    }

    PdfWriter writer;
    Typesetter ts(writer);

    // Title page (unnumbered).
    ts.new_page();
    double y = 620.0;
    for (const auto& line : wrap_text(doc.meta.title, 40)) {
        ts.centered(line, PdfWriter::Font::Bold, 22.0, y);
        y -= 30.0;
    }
    y -= 16.0;
    ts.centered("Period: " + doc.meta.period_label, PdfWriter::Font::Regular, 13.0, y);
    y -= 22.0;
    ts.centered(join_authors(doc.meta.authors), PdfWriter::Font::Regular, 12.0, y);
    y -= 22.0;
    ts.centered("Generated " + doc.meta.generated_at, PdfWriter::Font::Regular, 10.0, y);

    // Contents.
    ts.new_page();
    ts.heading("Contents");
    for (size_t i = 0; i < doc.sections.size(); ++i) {
        ts.paragraph(std::to_string(i + 1) + ". " + doc.sections[i].heading, 12.0);
    }

    // One page run per section.
    for (const auto& section : doc.sections) {
        ts.new_page();
        ts.heading(section.heading);
        for (const auto& paragraph : body_paragraphs(section, hook)) {
            ts.paragraph(paragraph);
        }
    }

    // Sources.
    ts.new_page();
    ts.heading("Sources");
    for (size_t i = 0; i < doc.sources.size(); ++i) {
        ts.paragraph(std::to_string(i + 1) + ". " + source_line(doc.sources[i]));
    }

    const fs::path path = out_dir / (digest_basename(doc.meta.period_label) + ".pdf");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RenderError("cannot open " + path.string());
    out << writer.finish();
    out.flush();
    if (!out) throw RenderError("write failed for " + path.string());
    return path;
}

}  // namespace digest::report
