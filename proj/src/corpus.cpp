#include "cmta/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "cmta/util.hpp"
#include "json.hpp"

using nlohmann::json;

namespace cmta {

MisinfoClass map_rating(FactCheckerRating rating) {
    switch (rating) {
        case FactCheckerRating::False_:
        case FactCheckerRating::FourPinocchios:
        case FactCheckerRating::Incorrect:
            return MisinfoClass::False_;
        case FactCheckerRating::PartiallyFalse:
        case FactCheckerRating::ThreePinocchios:
        case FactCheckerRating::TwoPinocchios:
            return MisinfoClass::PartiallyFalse;
        case FactCheckerRating::Misleading:
        case FactCheckerRating::NoEvidence:
        case FactCheckerRating::MostlyFalse:
            return MisinfoClass::Misleading;
    }
    throw std::logic_error("unreachable rating");
}

namespace {

// Canonical spellings plus known fact-checker variants. Lookup is on the
// case-folded string; anything else is an error.
const std::map<std::string, FactCheckerRating>& rating_table() {
    static const std::map<std::string, FactCheckerRating> table = {
        {"false", FactCheckerRating::False_},
        {"partially false", FactCheckerRating::PartiallyFalse},
        {"partly false", FactCheckerRating::PartiallyFalse},  // alias
        {"misleading", FactCheckerRating::Misleading},
        {"no evidence", FactCheckerRating::NoEvidence},
        {"four pinocchios", FactCheckerRating::FourPinocchios},
        {"incorrect", FactCheckerRating::Incorrect},
        {"inaccurate", FactCheckerRating::Incorrect},  // alias
        {"three pinocchios", FactCheckerRating::ThreePinocchios},
        {"two pinocchios", FactCheckerRating::TwoPinocchios},
        {"mostly false", FactCheckerRating::MostlyFalse},
    };
    return table;
}

}  // namespace

FactCheckerRating parse_rating(const std::string& text) {
    const auto& table = rating_table();
    const auto it = table.find(ascii_lower(trim(text)));
    if (it == table.end()) throw UnknownRating("unknown rating: " + text);
    return it->second;
}

std::string rating_name(FactCheckerRating r) {
    switch (r) {
        case FactCheckerRating::False_: return "False";
        case FactCheckerRating::PartiallyFalse: return "Partially False";
        case FactCheckerRating::Misleading: return "Misleading";
        case FactCheckerRating::NoEvidence: return "No evidence";
        case FactCheckerRating::FourPinocchios: return "Four Pinocchios";
        case FactCheckerRating::Incorrect: return "Incorrect";
        case FactCheckerRating::ThreePinocchios: return "Three Pinocchios";
        case FactCheckerRating::TwoPinocchios: return "Two Pinocchios";
        case FactCheckerRating::MostlyFalse: return "Mostly False";
    }
    return "?";
}

std::optional<MisinfoClass> parse_class(const std::string& text) {
    const std::string t = ascii_lower(trim(text));
    if (t == "false") return MisinfoClass::False_;
    if (t == "partially false" || t == "partially_false" || t == "partly false")
        return MisinfoClass::PartiallyFalse;
    if (t == "misleading") return MisinfoClass::Misleading;
    return std::nullopt;
}

std::string class_name(MisinfoClass c) {
    switch (c) {
        case MisinfoClass::False_: return "false";
        case MisinfoClass::PartiallyFalse: return "partially_false";
        case MisinfoClass::Misleading: return "misleading";
    }
    return "?";
}

const std::set<std::string>& default_languages() {
    static const std::set<std::string> langs = {"en", "es", "in", "fr", "ja", "th", "hi", "de"};
    return langs;
}

bool month_valid(const std::string& month) {
    if (month.size() != 7 || month[4] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
        if (!std::isdigit(static_cast<unsigned char>(month[i]))) return false;
    const int mm = (month[5] - '0') * 10 + (month[6] - '0');
    return mm >= 1 && mm <= 12;
}

namespace {

void validate_record(TextRecord& rec, const LoadOptions& opts, size_t line_no) {
    if (rec.raw_text.empty()) throw FormatError(line_no, "empty text");
    if (!utf8_valid(rec.raw_text)) throw FormatError(line_no, "invalid UTF-8 in text");
    const auto& langs = default_languages();
    if (!langs.count(rec.language) && !opts.extra_languages.count(rec.language))
        throw UnknownLanguage("unknown language: " + rec.language);
    if (rec.month && !month_valid(*rec.month))
        throw FormatError(line_no, "month not YYYY-MM: " + *rec.month);
    if (rec.rating) {
        const MisinfoClass derived = map_rating(*rec.rating);
        if (rec.gold_class && *rec.gold_class != derived)
            throw FormatError(line_no, "label disagrees with rating for id " + rec.id);
        rec.gold_class = derived;
    }
}

}  // namespace

TextRecord record_from_json_line(const std::string& line, size_t line_no,
                                 const LoadOptions& opts) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw FormatError(line_no, std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object()) throw FormatError(line_no, "not a JSON object");
    TextRecord rec;
    for (const char* key : {"id", "text", "language"})
        if (!j.contains(key) || !j[key].is_string())
            throw FormatError(line_no, std::string("missing required key: ") + key);
    rec.id = j["id"].get<std::string>();
    rec.raw_text = j["text"].get<std::string>();
    rec.language = j["language"].get<std::string>();
    if (j.contains("month") && !j["month"].is_null())
        rec.month = j["month"].get<std::string>();
    if (j.contains("source") && !j["source"].is_null())
        rec.source = j["source"].get<std::string>();
    if (j.contains("rating") && !j["rating"].is_null())
        rec.rating = parse_rating(j["rating"].get<std::string>());
    if (j.contains("label") && !j["label"].is_null()) {
        const std::string label = j["label"].get<std::string>();
        const auto c = parse_class(label);
        if (!c) throw FormatError(line_no, "unknown label: " + label);
        rec.gold_class = c;
    }
    validate_record(rec, opts, line_no);
    return rec;
}

std::string record_to_json_line(const TextRecord& rec) {
    json j;
    j["id"] = rec.id;
    j["text"] = rec.raw_text;
    j["language"] = rec.language;
    if (rec.month) j["month"] = *rec.month;
    if (rec.source) j["source"] = *rec.source;
    if (rec.rating) j["rating"] = rating_name(*rec.rating);
    if (rec.gold_class) j["label"] = class_name(*rec.gold_class);
    return j.dump();
}

namespace {

LoadResult load_jsonl(const std::string& path, const LoadOptions& opts) {
    LoadResult res;
    const auto lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            res.records.push_back(record_from_json_line(lines[i], i + 1, opts));
        } catch (const std::exception& e) {
            if (opts.strict) throw;
            res.errors.push_back({i + 1, e.what()});
        }
    }
    return res;
}

LoadResult load_csv(const std::string& path, const LoadOptions& opts) {
    LoadResult res;
    const auto rows = csv_read(path);
    if (rows.empty()) return res;
    const auto& header = rows[0];
    std::map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
    for (const char* key : {"id", "text", "language"})
        if (!col.count(key)) throw FormatError(1, std::string("missing CSV column: ") + key);
    auto get = [&](const std::vector<std::string>& row, const char* key) -> std::string {
        const auto it = col.find(key);
        if (it == col.end() || it->second >= row.size()) return "";
        return row[it->second];
    };
    for (size_t r = 1; r < rows.size(); ++r) {
        const size_t line_no = r + 1;
        try {
            TextRecord rec;
            rec.id = get(rows[r], "id");
            rec.raw_text = get(rows[r], "text");
            rec.language = get(rows[r], "language");
            if (auto m = get(rows[r], "month"); !m.empty()) rec.month = m;
            if (auto s = get(rows[r], "source"); !s.empty()) rec.source = s;
            if (auto rt = get(rows[r], "rating"); !rt.empty()) rec.rating = parse_rating(rt);
            if (auto lb = get(rows[r], "label"); !lb.empty()) {
                const auto c = parse_class(lb);
                if (!c) throw FormatError(line_no, "unknown label: " + lb);
                rec.gold_class = c;
            }
            validate_record(rec, opts, line_no);
            res.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            if (opts.strict) throw;
            res.errors.push_back({line_no, e.what()});
        }
    }
    return res;
}

}  // namespace

LoadResult load_dataset(const std::string& path, DatasetFormat format, const LoadOptions& opts) {
    std::ifstream probe(path);
    if (!probe) throw IoError("file not found: " + path);
    probe.close();
    return format == DatasetFormat::Jsonl ? load_jsonl(path, opts) : load_csv(path, opts);
}

void save_dataset_jsonl(const std::vector<TextRecord>& records, const std::string& path) {
    std::string out;
    for (const auto& rec : records) {
        out += record_to_json_line(rec);
        out += '\n';
    }
    write_file(path, out);
}

Split split_dataset(const std::vector<TextRecord>& records, const SplitSpec& spec) {
    auto check_frac = [](double f) { return f > 0.0 && f < 1.0; };
    if (!check_frac(spec.train_frac) || !check_frac(spec.val_frac) || !check_frac(spec.test_frac))
        throw std::invalid_argument("split fractions must each lie in (0,1)");
    if (std::abs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must sum to 1");
    for (const auto& rec : records)
        if (!rec.gold_class) throw MissingLabel("record lacks gold class: " + rec.id);

    const size_t n = records.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_val = static_cast<size_t>(std::floor(static_cast<double>(n) * spec.val_frac));
    const auto n_test = static_cast<size_t>(std::floor(static_cast<double>(n) * spec.test_frac));
    const size_t n_train = n - n_val - n_test;

    Split split;
    split.train.reserve(n_train);
    split.val.reserve(n_val);
    split.test.reserve(n_test);
    for (size_t i = 0; i < n; ++i) {
        const auto& rec = records[order[i]];
        if (i < n_train) split.train.push_back(rec);
        else if (i < n_train + n_val) split.val.push_back(rec);
        else split.test.push_back(rec);
    }
    return split;
}

Distribution class_distribution(const std::vector<TextRecord>& records, DistBy by) {
    Distribution dist;
    for (const auto& rec : records) {
        if (!rec.gold_class) {
            ++dist.unlabeled;
            continue;
        }
        ++dist.labeled;
        std::string key;
        switch (by) {
            case DistBy::Class: key = class_name(*rec.gold_class); break;
            case DistBy::Language: key = rec.language; break;
            case DistBy::ClassByLanguage:
                key = rec.language + "," + class_name(*rec.gold_class);
                break;
        }
        ++dist.counts[key];
    }
    return dist;
}

}  // namespace cmta
