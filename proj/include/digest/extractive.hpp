#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace digest::extractive {

struct SummaryConfig {
    int top_k = 3;
    std::set<std::string> stopwords;          // lowercase tokens
    double position_bonus_weight = 0.1;       // added to the first sentence's score
};

SummaryConfig default_config();

struct SentenceScore {
    int sentence_index = 0;
    std::string sentence_text;
    double score = 0.0;
};

// Splits after '.', '!' or '?' followed by whitespace and an ASCII uppercase
// letter, or at end of text. Segments are trimmed; empties dropped.
// Abbreviations followed by lowercase ("Approx. value") do not split.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercased runs of ASCII alphanumerics.
std::vector<std::string> tokenize(std::string_view text);

// Frequency + position scoring:
//   nf(t) = f(t) / max f, over non-stopword tokens of the whole document
//   score(s) = sum of nf over s's non-stopword token occurrences
//              / count of all tokens of s, plus the bonus for sentence 0.
std::vector<SentenceScore> score_sentences(const std::vector<std::string>& sentences,
                                           const SummaryConfig& config);

// Top-k sentences by score (ties keep the earlier sentence), re-emitted in
// document order and joined by single spaces. Documents of at most top_k
// sentences come back whole, with between-sentence whitespace normalized.
std::string extract_summary(std::string_view text, const SummaryConfig& config);

const std::set<std::string>& default_stopwords();

// One lowercase token per line, UTF-8; '#' lines and blanks ignored.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace digest::extractive
