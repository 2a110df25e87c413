#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cmta/corpus.hpp"
#include "cmta/model.hpp"
#include "cmta/preprocess.hpp"
#include "cmta/tokenizer.hpp"

namespace cmta {

struct UnsupportedFormat : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LabeledRecord {
    TextRecord record;
    MisinfoClass predicted = MisinfoClass::False_;
    std::array<double, 3> probs{};
    bool ok = true;
    std::string error;
};

// Classifies every record in input order; per-record failures are marked, not
// fatal. Records are cleaned internally. Worker count never changes results.
std::vector<LabeledRecord> classify_corpus(const Model& model, const Vocab& vocab,
                                           const StopwordTable& stopwords,
                                           const std::vector<TextRecord>& records,
                                           int workers = 1);

struct AggregationCell {
    std::string language;  // "" when not grouped by language
    std::string month;     // "" when not grouped by month; "unknown" when absent
    MisinfoClass cls = MisinfoClass::False_;
    long count = 0;

    bool operator==(const AggregationCell&) const = default;
};

struct AggregateResult {
    std::vector<AggregationCell> cells;  // sorted (language, month, class index)
    long skipped = 0;
    long total = 0;  // classified records counted into cells
};

struct AggregateDims {
    bool by_language = true;
    bool by_month = true;
};

AggregateResult aggregate(const std::vector<LabeledRecord>& records,
                          const AggregateDims& dims = {});

// Streaming merge: aggregating chunks then merging equals aggregating whole.
AggregateResult merge_aggregates(const AggregateResult& a, const AggregateResult& b);

enum class ReportFormat { Csv, Json, TextBarChart };

std::string emit_report(const AggregateResult& result, ReportFormat format);

// Inverse of the CSV report, for round-trip checks and downstream tooling.
AggregateResult parse_report_csv(const std::string& csv);

struct CorpusManifest {
    std::map<std::string, long> per_language;
    long total = 0;

    bool consistent() const;
    std::string to_csv() const;
    static CorpusManifest from_records(const std::vector<TextRecord>& records);
};

}  // namespace cmta
