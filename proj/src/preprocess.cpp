#include "cmta/preprocess.hpp"

#include <filesystem>
#include <regex>

#include "cmta/util.hpp"

namespace fs = std::filesystem;

namespace cmta {

void StopwordTable::add(const std::string& language, std::set<std::string> words,
                        std::string provenance) {
    std::set<std::string> folded;
    for (const auto& w : words) folded.insert(ascii_lower(w));
    tables_[language] = std::move(folded);
    provenance_[language] = std::move(provenance);
}

StopwordTable StopwordTable::load_file(const std::string& language, const std::string& path) {
    StopwordTable t;
    std::set<std::string> words;
    for (const auto& line : read_lines(path)) {
        const std::string w = trim(line);
        if (w.empty() || w[0] == '#') continue;
        words.insert(w);
    }
    t.add(language, std::move(words), path);
    return t;
}

StopwordTable StopwordTable::load_dir(const std::string& dir) {
    StopwordTable t;
    if (!fs::is_directory(dir)) throw IoError("stopword directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        StopwordTable one = load_file(p.stem().string(), p.string());
        for (auto& [lang, words] : one.tables_) t.add(lang, words, p.string());
    }
    return t;
}

bool StopwordTable::has(const std::string& language) const {
    return tables_.count(language) > 0;
}

const std::set<std::string>* StopwordTable::find(const std::string& language) const {
    const auto it = tables_.find(language);
    return it == tables_.end() ? nullptr : &it->second;
}

bool EmojiRanges::contains(char32_t cp) const {
    for (const auto& [lo, hi] : ranges)
        if (cp >= lo && cp <= hi) return true;
    return false;
}

namespace {

std::string collapse_whitespace(const std::string& s) {
    return join(split_whitespace(s), " ");
}

const std::regex& url_regex() {
    static const std::regex re(R"((https?://\S+)|(www\.\S+))");
    return re;
}

const std::regex& mention_regex() {
    static const std::regex re(R"(@\w+)");
    return re;
}

}  // namespace

std::string strip_noise(const std::string& text) {
    std::string s = std::regex_replace(text, url_regex(), " ");
    s = std::regex_replace(s, mention_regex(), " ");
    auto tokens = split_whitespace(s);
    size_t skip = 0;
    while (skip < tokens.size() && tokens[skip] == "RT") ++skip;
    tokens.erase(tokens.begin(), tokens.begin() + static_cast<ptrdiff_t>(skip));
    return join(tokens, " ");
}

std::string strip_hashtag_symbol(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        if (c != '#') out.push_back(c);
    return out;
}

std::string remove_emojis(const std::string& text, const EmojiRanges& ranges) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        const size_t start = i;
        const char32_t cp = utf8_decode_next(text, i);
        if (!ranges.contains(cp)) out.append(text, start, i - start);
    }
    return out;
}

bool language_needs_segmenter(const std::string& language) {
    return language == "th" || language == "ja";
}

namespace {

// Coarse script classes, enough to break token runs for th/ja.
enum class Script { Latin, Thai, Kana, Han, Hangul, Digit, Other };

Script script_of(char32_t cp) {
    if (cp >= '0' && cp <= '9') return Script::Digit;
    if (cp < 0x0E00) return Script::Latin;
    if (cp <= 0x0E7F) return Script::Thai;
    if (cp >= 0x3040 && cp <= 0x30FF) return Script::Kana;
    if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF)) return Script::Han;
    if (cp >= 0xAC00 && cp <= 0xD7AF) return Script::Hangul;
    return Script::Other;
}

}  // namespace

std::vector<std::string> segment_by_script(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& word : split_whitespace(text)) {
        std::string cur;
        Script cur_script = Script::Other;
        size_t i = 0;
        while (i < word.size()) {
            const size_t start = i;
            const char32_t cp = utf8_decode_next(word, i);
            const Script sc = script_of(cp);
            if (!cur.empty() && sc != cur_script) {
                out.push_back(cur);
                cur.clear();
            }
            cur.append(word, start, i - start);
            cur_script = sc;
        }
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::string remove_stopwords(const std::string& text, const std::string& language,
                             const StopwordTable& table, bool* warned,
                             const Segmenter& segmenter) {
    if (warned) *warned = false;
    const std::set<std::string>* words = table.find(language);
    if (!words) {
        if (warned) *warned = true;
        return text;
    }
    std::vector<std::string> tokens;
    if (language_needs_segmenter(language)) {
        tokens = segmenter ? segmenter(text) : segment_by_script(text);
    } else {
        tokens = split_whitespace(text);
    }
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (auto& t : tokens)
        if (!words->count(ascii_lower(t))) kept.push_back(std::move(t));
    return join(kept, " ");
}

CleanText clean(const TextRecord& record, const StopwordTable& table,
                const EmojiRanges& ranges) {
    CleanText out;
    out.language = record.language;

    std::string s = strip_noise(record.raw_text);
    out.applied_steps.push_back("strip_noise");
    s = strip_hashtag_symbol(s);
    out.applied_steps.push_back("strip_hashtag_symbol");
    s = remove_emojis(s, ranges);
    out.applied_steps.push_back("remove_emojis");
    bool warned = false;
    s = remove_stopwords(s, record.language, table, &warned);
    out.applied_steps.push_back(warned ? "remove_stopwords:missing_table" : "remove_stopwords");
    s = collapse_whitespace(s);

    out.text = std::move(s);
    out.emptied = out.text.empty();
    return out;
}

}  // namespace cmta
