#include "cmta/analyze.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "cmta/pipeline.hpp"
#include "cmta/util.hpp"
#include "json.hpp"

namespace cmta {

std::vector<LabeledRecord> classify_corpus(const Model& model, const Vocab& vocab,
                                           const StopwordTable& stopwords,
                                           const std::vector<TextRecord>& records,
                                           int workers) {
    std::vector<LabeledRecord> out(records.size());
    if (records.empty()) return out;
    workers = std::max(1, std::min<int>(workers, static_cast<int>(records.size())));

    auto work = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            LabeledRecord& lr = out[i];
            lr.record = records[i];
            try {
                const Prediction p =
                    predict(records[i].raw_text, records[i].language, vocab, model, stopwords);
                lr.predicted = p.cls;
                lr.probs = p.probs;
            } catch (const std::exception& e) {
                lr.ok = false;
                lr.error = e.what();
            }
        }
    };

    if (workers == 1) {
        work(0, records.size());
    } else {
        std::vector<std::thread> threads;
        const size_t chunk = (records.size() + static_cast<size_t>(workers) - 1) /
                             static_cast<size_t>(workers);
        for (int w = 0; w < workers; ++w) {
            const size_t begin = static_cast<size_t>(w) * chunk;
            const size_t end = std::min(records.size(), begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(work, begin, end);
        }
        for (auto& t : threads) t.join();
    }
    return out;
}

namespace {

void sort_cells(std::vector<AggregationCell>& cells) {
    std::sort(cells.begin(), cells.end(), [](const AggregationCell& a, const AggregationCell& b) {
        if (a.language != b.language) return a.language < b.language;
        if (a.month != b.month) return a.month < b.month;
        return static_cast<int>(a.cls) < static_cast<int>(b.cls);
    });
}

}  // namespace

AggregateResult aggregate(const std::vector<LabeledRecord>& records, const AggregateDims& dims) {
    std::map<std::tuple<std::string, std::string, int>, long> counts;
    AggregateResult res;
    for (const auto& lr : records) {
        if (!lr.ok) {
            ++res.skipped;
            continue;
        }
        const std::string lang = dims.by_language ? lr.record.language : "";
        const std::string month =
            dims.by_month ? lr.record.month.value_or("unknown") : "";
        ++counts[{lang, month, static_cast<int>(lr.predicted)}];
        ++res.total;
    }
    for (const auto& [key, count] : counts)
        res.cells.push_back({std::get<0>(key), std::get<1>(key),
                             static_cast<MisinfoClass>(std::get<2>(key)), count});
    sort_cells(res.cells);
    return res;
}

AggregateResult merge_aggregates(const AggregateResult& a, const AggregateResult& b) {
    std::map<std::tuple<std::string, std::string, int>, long> counts;
    for (const auto* part : {&a, &b})
        for (const auto& c : part->cells)
            counts[{c.language, c.month, static_cast<int>(c.cls)}] += c.count;
    AggregateResult res;
    res.skipped = a.skipped + b.skipped;
    res.total = a.total + b.total;
    for (const auto& [key, count] : counts)
        res.cells.push_back({std::get<0>(key), std::get<1>(key),
                             static_cast<MisinfoClass>(std::get<2>(key)), count});
    sort_cells(res.cells);
    return res;
}

std::string emit_report(const AggregateResult& result, ReportFormat format) {
    switch (format) {
        case ReportFormat::Csv: {
            std::ostringstream out;
            out << "language,month,class,count\n";
            for (const auto& c : result.cells)
                out << c.language << "," << c.month << "," << class_name(c.cls) << ","
                    << c.count << "\n";
            if (result.skipped > 0) out << "#skipped," << result.skipped << "\n";
            return out.str();
        }
        case ReportFormat::Json: {
            nlohmann::json root;
            nlohmann::json& by_lang = root["cells"];
            by_lang = nlohmann::json::object();
            for (const auto& c : result.cells)
                by_lang[c.language.empty() ? "all" : c.language]
                       [c.month.empty() ? "all" : c.month][class_name(c.cls)] = c.count;
            root["total"] = result.total;
            root["skipped"] = result.skipped;
            return root.dump(2) + "\n";
        }
        case ReportFormat::TextBarChart: {
            long max_count = 1;
            for (const auto& c : result.cells) max_count = std::max(max_count, c.count);
            std::ostringstream out;
            for (const auto& c : result.cells) {
                const int width =
                    static_cast<int>(40.0 * static_cast<double>(c.count) /
                                     static_cast<double>(max_count) + 0.5);
                char head[96];
                std::snprintf(head, sizeof(head), "%-4s %-8s %-16s %8ld ",
                              c.language.empty() ? "-" : c.language.c_str(),
                              c.month.empty() ? "-" : c.month.c_str(),
                              class_name(c.cls).c_str(), c.count);
                out << head << std::string(static_cast<size_t>(width), '#') << "\n";
            }
            if (result.skipped > 0) out << "skipped: " << result.skipped << "\n";
            return out.str();
        }
    }
    throw UnsupportedFormat("unsupported report format");
}

AggregateResult parse_report_csv(const std::string& csv) {
    AggregateResult res;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        if (line.rfind("#skipped,", 0) == 0) {
            res.skipped = std::stol(line.substr(9));
            continue;
        }
        const auto fields = csv_split_record(line);
        if (fields.size() != 4) throw FormatError(0, "bad aggregation CSV row: " + line);
        const auto cls = parse_class(fields[2]);
        if (!cls) throw FormatError(0, "bad class in aggregation CSV: " + fields[2]);
        const long count = std::stol(fields[3]);
        res.cells.push_back({fields[0], fields[1], *cls, count});
        res.total += count;
    }
    sort_cells(res.cells);
    return res;
}

bool CorpusManifest::consistent() const {
    long sum = 0;
    for (const auto& [lang, count] : per_language) sum += count;
    return sum == total;
}

std::string CorpusManifest::to_csv() const {
    std::ostringstream out;
    out << "language,count\n";
    for (const auto& [lang, count] : per_language) out << lang << "," << count << "\n";
    out << "total," << total << "\n";
    return out.str();
}

CorpusManifest CorpusManifest::from_records(const std::vector<TextRecord>& records) {
    CorpusManifest m;
    for (const auto& r : records) ++m.per_language[r.language];
    m.total = static_cast<long>(records.size());
    return m;
}

}  // namespace cmta
