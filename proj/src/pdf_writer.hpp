#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace digest::report {

// Minimal PDF generator: A4 pages, built-in Helvetica faces, uncompressed
// content streams. Text is WinAnsi-encoded; codepoints the encoding cannot
// represent degrade to '?'.
class PdfWriter {
public:
    static constexpr double kPageWidth = 595.0;
    static constexpr double kPageHeight = 842.0;

    enum class Font { Regular, Bold };

    void begin_page();
    void show_text(double x, double y, Font font, double size, std::string_view utf8);
    size_t page_count() const { return pages_.size(); }

    // Serializes the document. Pages after the first get a centered footer
    // with their page number.
    std::string finish();

    static std::string encode_text(std::string_view utf8);  // WinAnsi bytes, PDF-escaped

private:
    std::vector<std::string> pages_;  // content streams
};

// Greedy word wrap against an approximate character budget for the face size.
std::vector<std::string> wrap_text(std::string_view text, size_t max_chars);

}  // namespace digest::report
