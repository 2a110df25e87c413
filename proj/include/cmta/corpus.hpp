#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmta {

// Fact-checker ratings as scraped; closed set.
enum class FactCheckerRating {
    False_,
    PartiallyFalse,
    Misleading,
    NoEvidence,
    FourPinocchios,
    Incorrect,
    ThreePinocchios,
    TwoPinocchios,
    MostlyFalse,
};
inline constexpr int kNumRatings = 9;

// Output classes; index order is frozen (defines the classifier output order).
enum class MisinfoClass : int {
    False_ = 0,
    PartiallyFalse = 1,
    Misleading = 2,
};
inline constexpr int kNumClasses = 3;

MisinfoClass map_rating(FactCheckerRating rating);

// Case-insensitive parse with an explicit alias table; throws UnknownRating.
FactCheckerRating parse_rating(const std::string& text);
std::string rating_name(FactCheckerRating r);

std::optional<MisinfoClass> parse_class(const std::string& text);
std::string class_name(MisinfoClass c);

struct TextRecord {
    std::string id;
    std::string raw_text;
    std::string language;  // ISO-639-1 style code
    std::optional<std::string> month;  // "YYYY-MM"
    std::optional<std::string> source;
    std::optional<FactCheckerRating> rating;
    std::optional<MisinfoClass> gold_class;
};

struct UnknownRating : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownLanguage : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
    FormatError(size_t line, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line) + ": " + reason), line(line) {}
    size_t line;
};
struct MissingLabel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RowError {
    size_t line;  // 1-based
    std::string reason;
};

enum class DatasetFormat { Jsonl, Csv };

struct LoadOptions {
    bool strict = false;  // strict: any malformed row aborts the load
    std::set<std::string> extra_languages;  // accepted in addition to the defaults
};

const std::set<std::string>& default_languages();

struct LoadResult {
    std::vector<TextRecord> records;
    std::vector<RowError> errors;
};

LoadResult load_dataset(const std::string& path, DatasetFormat format,
                        const LoadOptions& opts = {});

void save_dataset_jsonl(const std::vector<TextRecord>& records, const std::string& path);

std::string record_to_json_line(const TextRecord& rec);
// Parses one JSONL object; validates language/rating/label. `line` for error reporting.
TextRecord record_from_json_line(const std::string& line, size_t line_no,
                                 const LoadOptions& opts);

struct SplitSpec {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    uint64_t seed = 0;
};

struct Split {
    std::vector<TextRecord> train, val, test;
};

// Deterministic shuffle keyed by seed; floor(n*val) and floor(n*test),
// remainder to train.
Split split_dataset(const std::vector<TextRecord>& records, const SplitSpec& spec);

enum class DistBy { Class, Language, ClassByLanguage };

struct Distribution {
    // key: class name, language, or "language,class" depending on `by`
    std::map<std::string, size_t> counts;
    size_t labeled = 0;
    size_t unlabeled = 0;
};

Distribution class_distribution(const std::vector<TextRecord>& records, DistBy by);

bool month_valid(const std::string& month);

}  // namespace cmta
