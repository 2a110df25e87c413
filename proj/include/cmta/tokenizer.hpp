#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cmta {

struct TargetTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// WordPiece vocabulary. Ids are dense 0..|V|-1; specials are pinned:
// [PAD]=0, [UNK]=1, [CLS]=2, [SEP]=3. Continuation pieces carry "##".
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;

    Vocab();
    explicit Vocab(std::vector<std::string> tokens);  // must start with the specials

    int size() const { return static_cast<int>(tokens_.size()); }
    const std::string& token(int id) const;
    // -1 when absent.
    int id_of(const std::string& token) const;
    bool contains(const std::string& token) const { return id_of(token) >= 0; }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // One token per line, line number = id. Bit-exact round trip.
    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

    // SHA-256 over the newline-joined token list; pins a checkpoint to its vocab.
    std::string content_hash() const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

// Frequency-greedy pair merging over the corpus until `target_size` is
// reached. Deterministic: ties broken by lexicographic pair order.
Vocab build_vocab(const std::vector<std::string>& corpus, int target_size);

// Greedy longest-match split; a word with an uncoverable position becomes [UNK].
std::vector<std::string> wordpiece_split(const std::string& word, const Vocab& vocab);

struct TokenSequence {
    std::vector<int> ids;
    std::vector<int> segment_ids;
    std::vector<int> attention_mask;
    int true_length = 0;
};

TokenSequence encode(const std::string& text, const Vocab& vocab, int max_len);

std::string decode(const TokenSequence& seq, const Vocab& vocab);

}  // namespace cmta
