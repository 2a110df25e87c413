#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cmta/corpus.hpp"

namespace cmta {

struct CleanText {
    std::string text;
    std::vector<std::string> applied_steps;
    std::string language;
    bool emptied = false;  // cleaning removed everything
};

// Per-language stopword sets; lookup is exact match on the case-folded token.
class StopwordTable {
public:
    void add(const std::string& language, std::set<std::string> words,
             std::string provenance = "");
    // Loads every "<lang>.txt" in a directory; '#'-prefixed lines are comments.
    static StopwordTable load_dir(const std::string& dir);
    static StopwordTable load_file(const std::string& language, const std::string& path);

    bool has(const std::string& language) const;
    const std::set<std::string>* find(const std::string& language) const;
    const std::map<std::string, std::string>& provenance() const { return provenance_; }

private:
    std::map<std::string, std::set<std::string>> tables_;
    std::map<std::string, std::string> provenance_;
};

// Word segmenter hook for languages without whitespace word boundaries.
using Segmenter = std::function<std::vector<std::string>(const std::string&)>;

// Default segmenter: splits on whitespace, then breaks runs at script
// boundaries (Thai, Japanese kana/han, etc. vs everything else).
std::vector<std::string> segment_by_script(const std::string& text);

struct EmojiRanges {
    std::vector<std::pair<char32_t, char32_t>> ranges = {
        {0x1F300, 0x1FAFF}, {0x2600, 0x27BF}, {0xFE0F, 0xFE0F},
        {0x200D, 0x200D},   {0x1F1E6, 0x1F1FF},
    };
    bool contains(char32_t cp) const;
};

// Removes URLs, @mentions, and leading retweet markers; collapses whitespace.
std::string strip_noise(const std::string& text);

// Removes every '#', keeping the tag word.
std::string strip_hashtag_symbol(const std::string& text);

std::string remove_emojis(const std::string& text, const EmojiRanges& ranges = {});

// Drops tokens whose case-folded form is in table[language]. Languages
// without a table pass through unchanged; `warned` reports that case.
std::string remove_stopwords(const std::string& text, const std::string& language,
                             const StopwordTable& table, bool* warned = nullptr,
                             const Segmenter& segmenter = nullptr);

bool language_needs_segmenter(const std::string& language);

CleanText clean(const TextRecord& record, const StopwordTable& table,
                const EmojiRanges& ranges = {});

}  // namespace cmta
