#include "cmta/tokenizer.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cmta/util.hpp"

namespace cmta {

namespace {
const std::vector<std::string>& special_tokens() {
    static const std::vector<std::string> specials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
    return specials;
}
}  // namespace

Vocab::Vocab() : Vocab(special_tokens()) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    const auto& specials = special_tokens();
    if (tokens_.size() < specials.size() ||
        !std::equal(specials.begin(), specials.end(), tokens_.begin()))
        throw std::invalid_argument("vocab must begin with [PAD],[UNK],[CLS],[SEP]");
    for (size_t i = 0; i < tokens_.size(); ++i) {
        if (!ids_.emplace(tokens_[i], static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate vocab token: " + tokens_[i]);
    }
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) throw UnknownId("token id out of range: " + std::to_string(id));
    return tokens_[static_cast<size_t>(id)];
}

int Vocab::id_of(const std::string& token) const {
    const auto it = ids_.find(token);
    return it == ids_.end() ? -1 : it->second;
}

void Vocab::save(const std::string& path) const {
    std::string out;
    for (const auto& t : tokens_) {
        out += t;
        out += '\n';
    }
    write_file(path, out);
}

Vocab Vocab::load(const std::string& path) {
    auto lines = read_lines(path);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return Vocab(std::move(lines));
}

std::string Vocab::content_hash() const {
    std::string joined;
    for (const auto& t : tokens_) {
        joined += t;
        joined += '\n';
    }
    return sha256_hex(joined);
}

namespace {

// A word as a sequence of current symbols ("a", "##b", merged pieces, ...).
struct WordEntry {
    std::vector<std::string> symbols;
    long freq = 0;
};

std::vector<std::string> initial_symbols(const std::string& word) {
    std::vector<std::string> syms;
    size_t i = 0;
    bool first = true;
    while (i < word.size()) {
        const size_t start = i;
        utf8_decode_next(word, i);
        std::string ch = word.substr(start, i - start);
        syms.push_back(first ? ch : "##" + ch);
        first = false;
    }
    return syms;
}

std::string merge_symbol(const std::string& a, const std::string& b) {
    // The right symbol always carries "##" inside a word; strip it on merge.
    std::string body = b.rfind("##", 0) == 0 ? b.substr(2) : b;
    return a + body;
}

}  // namespace

Vocab build_vocab(const std::vector<std::string>& corpus, int target_size) {
    if (corpus.empty()) throw std::invalid_argument("empty corpus");

    // Word frequency table, deterministic order by first appearance.
    std::vector<WordEntry> words;
    std::map<std::string, size_t> word_index;
    for (const auto& text : corpus) {
        for (const auto& w : split_whitespace(text)) {
            const auto it = word_index.find(w);
            if (it == word_index.end()) {
                word_index[w] = words.size();
                words.push_back({initial_symbols(w), 1});
            } else {
                ++words[it->second].freq;
            }
        }
    }

    // Character inventory: bare form of every codepoint plus "##" forms of
    // codepoints seen word-internally.
    std::set<std::string> chars;
    for (const auto& we : words) {
        for (size_t i = 0; i < we.symbols.size(); ++i) {
            const std::string& sym = we.symbols[i];
            const std::string bare = sym.rfind("##", 0) == 0 ? sym.substr(2) : sym;
            chars.insert(bare);
            if (i > 0) chars.insert("##" + bare);
        }
    }

    std::vector<std::string> tokens = special_tokens();
    const int base = static_cast<int>(tokens.size() + chars.size());
    if (base > target_size)
        throw TargetTooSmall("character inventory (" + std::to_string(base) +
                             ") exceeds target size " + std::to_string(target_size));
    tokens.insert(tokens.end(), chars.begin(), chars.end());
    std::set<std::string> present(tokens.begin(), tokens.end());

    while (static_cast<int>(tokens.size()) < target_size) {
        // Count adjacent symbol pairs, weighted by word frequency.
        std::map<std::pair<std::string, std::string>, long> pair_freq;
        for (const auto& we : words)
            for (size_t i = 0; i + 1 < we.symbols.size(); ++i)
                pair_freq[{we.symbols[i], we.symbols[i + 1]}] += we.freq;
        if (pair_freq.empty()) break;

        // Highest frequency wins; std::map iteration gives the lexicographically
        // smallest pair on ties.
        std::pair<std::string, std::string> best;
        long best_freq = -1;
        for (const auto& [pair, freq] : pair_freq) {
            if (freq > best_freq) {
                best = pair;
                best_freq = freq;
            }
        }
        const std::string merged = merge_symbol(best.first, best.second);
        if (!present.count(merged)) {
            tokens.push_back(merged);
            present.insert(merged);
        }
        for (auto& we : words) {
            auto& syms = we.symbols;
            for (size_t i = 0; i + 1 < syms.size();) {
                if (syms[i] == best.first && syms[i + 1] == best.second) {
                    syms[i] = merged;
                    syms.erase(syms.begin() + static_cast<ptrdiff_t>(i) + 1);
                } else {
                    ++i;
                }
            }
        }
    }
    return Vocab(std::move(tokens));
}

std::vector<std::string> wordpiece_split(const std::string& word, const Vocab& vocab) {
    std::vector<std::string> pieces;
    size_t pos = 0;
    while (pos < word.size()) {
        // Longest vocab prefix of the remainder; "##" form past the first piece.
        size_t best_len = 0;
        std::string best_tok;
        size_t i = pos;
        std::string candidate = pos == 0 ? "" : "##";
        while (i < word.size()) {
            const size_t start = i;
            utf8_decode_next(word, i);
            candidate.append(word, start, i - start);
            if (vocab.contains(candidate)) {
                best_len = i - pos;
                best_tok = candidate;
            }
        }
        if (best_len == 0) return {"[UNK]"};
        pieces.push_back(best_tok);
        pos += best_len;
    }
    return pieces;
}

TokenSequence encode(const std::string& text, const Vocab& vocab, int max_len) {
    if (max_len < 3) throw std::invalid_argument("max_len must be >= 3");
    std::vector<int> content;
    for (const auto& word : split_whitespace(text))
        for (const auto& piece : wordpiece_split(word, vocab)) {
            const int id = vocab.id_of(piece);
            content.push_back(id >= 0 ? id : Vocab::kUnk);
        }
    // [CLS] + content + [SEP], tail-truncated to max_len.
    const size_t room = static_cast<size_t>(max_len) - 2;
    if (content.size() > room) content.resize(room);

    TokenSequence seq;
    seq.ids.assign(static_cast<size_t>(max_len), Vocab::kPad);
    seq.segment_ids.assign(static_cast<size_t>(max_len), 0);
    seq.attention_mask.assign(static_cast<size_t>(max_len), 0);
    size_t p = 0;
    seq.ids[p++] = Vocab::kCls;
    for (int id : content) seq.ids[p++] = id;
    seq.ids[p++] = Vocab::kSep;
    seq.true_length = static_cast<int>(p);
    for (size_t i = 0; i < p; ++i) seq.attention_mask[i] = 1;
    return seq;
}

std::string decode(const TokenSequence& seq, const Vocab& vocab) {
    std::vector<std::string> words;
    for (const int id : seq.ids) {
        if (id == Vocab::kPad || id == Vocab::kCls || id == Vocab::kSep || id == Vocab::kUnk)
            continue;
        const std::string& tok = vocab.token(id);
        if (tok.rfind("##", 0) == 0 && !words.empty()) {
            words.back() += tok.substr(2);
        } else {
            words.push_back(tok);
        }
    }
    return join(words, " ");
}

}  // namespace cmta
