#include "digest/extractive.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "digest/errors.hpp"

namespace digest::extractive {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

SummaryConfig default_config() {
    return SummaryConfig{3, default_stopwords(), 0.1};
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    size_t start = 0;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        size_t j = i + 1;
        while (j < text.size() && is_space(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] >= 'A' && text[j] <= 'Z') {
            std::string sentence = trim(text.substr(start, i + 1 - start));
            if (!sentence.empty()) sentences.push_back(std::move(sentence));
            start = j;
            i = j - 1;
        }
    }
    if (start < text.size()) {
        std::string sentence = trim(text.substr(start));
        if (!sentence.empty()) sentences.push_back(std::move(sentence));
    }
    return sentences;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<SentenceScore> score_sentences(const std::vector<std::string>& sentences,
                                           const SummaryConfig& config) {
    if (sentences.empty()) throw EmptyDocument("no sentences to score");

    std::vector<std::vector<std::string>> sentence_tokens;
    sentence_tokens.reserve(sentences.size());
    std::unordered_map<std::string, long> freq;
    for (const auto& s : sentences) {
        auto tokens = tokenize(s);
        for (const auto& t : tokens) {
            if (!config.stopwords.count(t)) ++freq[t];
        }
        sentence_tokens.push_back(std::move(tokens));
    }
    long max_freq = 0;
    for (const auto& [t, f] : freq) max_freq = std::max(max_freq, f);

    std::vector<SentenceScore> scores;
    scores.reserve(sentences.size());
    for (size_t i = 0; i < sentences.size(); ++i) {
        double sum = 0.0;
        if (max_freq > 0) {
            for (const auto& t : sentence_tokens[i]) {
                if (!config.stopwords.count(t)) sum += double(freq[t]) / double(max_freq);
            }
        }
        const size_t denom = sentence_tokens[i].size();
        double score = denom > 0 ? sum / double(denom) : 0.0;
        if (i == 0) score += config.position_bonus_weight;
        scores.push_back({int(i), sentences[i], score});
    }
    return scores;
}

std::string extract_summary(std::string_view text, const SummaryConfig& config) {
    if (config.top_k < 1) throw ConfigError("top_k must be >= 1");
    const auto sentences = split_sentences(text);
    if (sentences.empty()) return "";

    auto join = [](const std::vector<std::string>& parts) {
        std::string out;
        for (const auto& p : parts) {
            if (!out.empty()) out += ' ';
            out += p;
        }
        return out;
    };

    if (int(sentences.size()) <= config.top_k) return join(sentences);

    const auto scores = score_sentences(sentences, config);
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&scores](int a, int b) {
        if (scores[a].score != scores[b].score) return scores[a].score > scores[b].score;
        return a < b;
    });
    order.resize(size_t(config.top_k));
    std::sort(order.begin(), order.end());

    std::vector<std::string> selected;
    selected.reserve(order.size());
    for (int idx : order) selected.push_back(sentences[size_t(idx)]);
    return join(selected);
}

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> kStopwords = {
        "a",    "about", "after", "all",   "an",   "and",  "any",  "are",   "as",    "at",
        "be",   "been",  "but",   "by",    "can",  "did",  "do",   "for",   "from",  "had",
        "has",  "have",  "if",    "in",    "into", "is",   "it",   "its",   "no",    "not",
        "of",   "on",    "or",    "our",   "over", "so",   "such", "than",  "that",  "the",
        "their", "then", "there", "these", "they", "this", "to",   "under", "was",   "we",
        "were", "which", "with"};
    return kStopwords;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open stopword file " + path.string());
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const std::string word = trim(line);
        if (word.empty() || word[0] == '#') continue;
        std::string lowered;
        lowered.reserve(word.size());
        for (char c : word) lowered.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        words.insert(lowered);
    }
    return words;
}

}  // namespace digest::extractive
