#include "pdf_writer.hpp"

#include <cstdio>
#include <stdexcept>

namespace digest::report {

namespace {

// Common typographic codepoints that WinAnsi places in 0x80..0x9F.
int winansi_byte(unsigned long cp) {
    if (cp < 0x80) return int(cp);
    switch (cp) {
        case 0x20AC: return 0x80;  // euro sign
        case 0x2026: return 0x85;  // ellipsis
        case 0x2018: return 0x91;  // left single quote
        case 0x2019: return 0x92;  // right single quote
        case 0x201C: return 0x93;  // left double quote
        case 0x201D: return 0x94;  // right double quote
        case 0x2013: return 0x96;  // en dash
        case 0x2014: return 0x97;  // em dash
        default: break;
    }
    if (cp >= 0xA0 && cp <= 0xFF) return int(cp);  // Latin-1 range matches WinAnsi
    return '?';
}

// Decodes one UTF-8 scalar starting at i; advances i past it.
unsigned long next_codepoint(std::string_view s, size_t& i) {
    const unsigned char c = s[i];
    unsigned long cp = c;
    int extra = 0;
    if (c >= 0xF0) {
        cp = c & 0x07;
        extra = 3;
    } else if (c >= 0xE0) {
        cp = c & 0x0F;
        extra = 2;
    } else if (c >= 0xC0) {
        cp = c & 0x1F;
        extra = 1;
    }
    ++i;
    for (int k = 0; k < extra && i < s.size(); ++k, ++i) {
        cp = (cp << 6) | (s[i] & 0x3F);
    }
    return cp;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string PdfWriter::encode_text(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    size_t i = 0;
    while (i < utf8.size()) {
        const int b = winansi_byte(next_codepoint(utf8, i));
        if (b == '(' || b == ')' || b == '\\') {
            out.push_back('\\');
            out.push_back(char(b));
        } else if (b < 32 || b > 126) {
            char esc[8];
            std::snprintf(esc, sizeof(esc), "\\%03o", unsigned(b) & 0xFF);
            out += esc;
        } else {
            out.push_back(char(b));
        }
    }
    return out;
}

void PdfWriter::begin_page() { pages_.emplace_back(); }

void PdfWriter::show_text(double x, double y, Font font, double size, std::string_view utf8) {
    if (pages_.empty()) throw std::logic_error("show_text before begin_page");
    std::string& content = pages_.back();
    content += "BT /";
    content += font == Font::Bold ? "F2" : "F1";
    content += " " + fmt_coord(size) + " Tf " + fmt_coord(x) + " " + fmt_coord(y) + " Td (";
    content += encode_text(utf8);
    content += ") Tj ET\n";
}

std::string PdfWriter::finish() {
    // Footer page numbers on every page after the first.
    for (size_t i = 1; i < pages_.size(); ++i) {
        const std::string label = std::to_string(i + 1);
        const double x = kPageWidth / 2.0 - 2.5 * double(label.size());
        pages_[i] += "BT /F1 9 Tf " + fmt_coord(x) + " 30.00 Td (" + label + ") Tj ET\n";
    }

    // Object layout: 1 catalog, 2 page tree, 3/4 fonts, then page + content
    // pairs.
    std::vector<std::string> objects;
    std::string kids;
    const size_t n_pages = pages_.size();
    for (size_t i = 0; i < n_pages; ++i) {
        if (i > 0) kids += " ";
        kids += std::to_string(5 + 2 * i) + " 0 R";
    }
    objects.push_back("<< /Type /Catalog /Pages 2 0 R >>");
    objects.push_back("<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(n_pages) +
                      " >>");
    objects.push_back(
        "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>");
    objects.push_back(
        "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica-Bold /Encoding /WinAnsiEncoding >>");
    for (size_t i = 0; i < n_pages; ++i) {
        objects.push_back("<< /Type /Page /Parent 2 0 R /MediaBox [0 0 " + fmt_coord(kPageWidth) +
                          " " + fmt_coord(kPageHeight) +
                          "] /Resources << /Font << /F1 3 0 R /F2 4 0 R >> >> /Contents " +
                          std::to_string(6 + 2 * i) + " 0 R >>");
        objects.push_back("<< /Length " + std::to_string(pages_[i].size()) + " >>\nstream\n" +
                          pages_[i] + "endstream");
    }

    std::string out = "%PDF-1.4\n";
    std::vector<size_t> offsets;
    offsets.reserve(objects.size());
    for (size_t i = 0; i < objects.size(); ++i) {
        offsets.push_back(out.size());
        out += std::to_string(i + 1) + " 0 obj\n" + objects[i] + "\nendobj\n";
    }
    const size_t xref_offset = out.size();
    out += "xref\n0 " + std::to_string(objects.size() + 1) + "\n";
    out += "0000000000 65535 f \n";
    for (size_t off : offsets) {
        char line[32];
        std::snprintf(line, sizeof(line), "%010zu 00000 n \n", off);
        out += line;
    }
    out += "trailer\n<< /Size " + std::to_string(objects.size() + 1) + " /Root 1 0 R >>\n";
    out += "startxref\n" + std::to_string(xref_offset) + "\n%%EOF\n";
    return out;
}

std::vector<std::string> wrap_text(std::string_view text, size_t max_chars) {
    std::vector<std::string> lines;
    std::string current;
    size_t pos = 0;
    auto push_current = [&]() {
        lines.push_back(current);
        current.clear();
    };
    while (pos < text.size()) {
        size_t end = text.find(' ', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view word = text.substr(pos, end - pos);
        pos = end + 1;
        if (word.empty()) continue;
        while (word.size() > max_chars) {  // hard-break oversized tokens
            if (!current.empty()) push_current();
            lines.emplace_back(word.substr(0, max_chars));
            word.remove_prefix(max_chars);
        }
        const size_t needed = word.size() + (current.empty() ? 0 : 1);
        if (current.size() + needed > max_chars && !current.empty()) push_current();
        if (!current.empty()) current += ' ';
        current += word;
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

}  // namespace digest::report
