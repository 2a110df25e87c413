#include "cmta/fixtures.hpp"

#include <map>
#include <random>
#include <stdexcept>

namespace cmta {

const std::vector<std::string>& class_markers(MisinfoClass cls) {
    static const std::vector<std::string> markers[3] = {
        {"zorvux", "falqem"},
        {"plimra", "parvon"},
        {"miswex", "glondu"},
    };
    return markers[static_cast<size_t>(cls)];
}

MisinfoClass marker_oracle(const std::string& text) {
    for (int c = 0; c < 3; ++c)
        for (const auto& m : class_markers(static_cast<MisinfoClass>(c)))
            if (text.find(m) != std::string::npos) return static_cast<MisinfoClass>(c);
    throw std::invalid_argument("marker_oracle: no class marker in text");
}

namespace {

const std::vector<std::string>& filler_words(const std::string& language) {
    static const std::map<std::string, std::vector<std::string>> fillers = {
        {"en", {"virus", "mask", "report", "claim", "city", "health"}},
        {"es", {"vacuna", "gente", "noticia", "salud", "ciudad", "dato"}},
        {"fr", {"ville", "sante", "avis", "texte", "monde", "cas"}},
        {"de", {"stadt", "beleg", "woche", "zahl", "lage", "amt"}},
        {"hi", {"khabar", "shahar", "jaanch", "tathya", "roga", "dava"}},
        {"in", {"kota", "berita", "fakta", "kasus", "obat", "warga"}},
        {"ja", {"toshi", "kiji", "jijitsu", "byoki", "kusuri", "shimin"}},
        {"th", {"muang", "khao", "khwam", "rok", "yaa", "khon"}},
    };
    const auto it = fillers.find(language);
    if (it != fillers.end()) return it->second;
    return fillers.at("en");
}

const char* kMonths[5] = {"2020-02", "2020-03", "2020-04", "2020-05", "2020-06"};

}  // namespace

std::vector<TextRecord> gen_synthetic(const SyntheticSpec& spec) {
    std::vector<TextRecord> records;
    std::mt19937_64 rng(spec.seed);
    int serial = 0;
    for (const auto& lang : spec.languages) {
        const auto& fillers = filler_words(lang);
        for (int c = 0; c < kNumClasses; ++c) {
            const auto& markers = class_markers(static_cast<MisinfoClass>(c));
            for (int i = 0; i < spec.records_per_class; ++i) {
                TextRecord rec;
                rec.id = "syn-" + std::to_string(serial);
                rec.language = lang;
                rec.month = kMonths[serial % 5];
                rec.gold_class = static_cast<MisinfoClass>(c);
                std::string text;
                for (int w = 0; w < 8; ++w) {
                    if (!text.empty()) text += " ";
                    // markers dominate so the signal is unmistakable
                    if (w % 2 == 0) {
                        text += markers[static_cast<size_t>(rng() % markers.size())];
                    } else {
                        text += fillers[static_cast<size_t>(rng() % fillers.size())];
                    }
                }
                rec.raw_text = text;
                records.push_back(std::move(rec));
                ++serial;
            }
        }
    }
    return records;
}

std::vector<TextRecord> table1_fixture() {
    struct Row {
        const char* language;
        MisinfoClass cls;
        FactCheckerRating rating;
        int count;
        const char* source;
    };
    // Class/language counts mirror the collected misinformation dataset; the
    // final 500 English false items come from the second source.
    static const Row rows[] = {
        {"en", MisinfoClass::False_, FactCheckerRating::False_, 2869, "poynter"},
        {"en", MisinfoClass::PartiallyFalse, FactCheckerRating::PartiallyFalse, 2765, "poynter"},
        {"en", MisinfoClass::Misleading, FactCheckerRating::Misleading, 2837, "poynter"},
        {"es", MisinfoClass::False_, FactCheckerRating::False_, 191, "latam"},
        {"es", MisinfoClass::PartiallyFalse, FactCheckerRating::PartiallyFalse, 161, "latam"},
        {"es", MisinfoClass::Misleading, FactCheckerRating::Misleading, 179, "latam"},
        {"en", MisinfoClass::False_, FactCheckerRating::False_, 500, "checkworthy"},
    };
    std::vector<TextRecord> records;
    records.reserve(9502);
    int serial = 0;
    for (const auto& row : rows) {
        for (int i = 0; i < row.count; ++i) {
            TextRecord rec;
            rec.id = "t1-" + std::to_string(serial);
            rec.language = row.language;
            rec.month = kMonths[serial % 5];
            rec.source = row.source;
            rec.rating = row.rating;
            rec.gold_class = row.cls;
            rec.raw_text = std::string("fixture item ") + std::to_string(serial) + " " +
                           class_markers(row.cls)[0];
            records.push_back(std::move(rec));
            ++serial;
        }
    }
    return records;
}

}  // namespace cmta
