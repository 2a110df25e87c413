#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <set>

#include "cmta/preprocess.hpp"
#include "cmta/util.hpp"
#include "doctest.h"

using namespace cmta;

namespace {

TextRecord make_record(const std::string& text, const std::string& lang = "en") {
    TextRecord r;
    r.id = "t";
    r.raw_text = text;
    r.language = lang;
    return r;
}

StopwordTable en_table(std::set<std::string> words) {
    StopwordTable t;
    t.add("en", std::move(words));
    return t;
}

}  // namespace

TEST_CASE("strip_noise removes urls, mentions, and retweet markers") {
    CHECK(strip_noise("RT @bob check https://x.co now") == "check now");
    CHECK(strip_noise("hello world") == "hello world");
    CHECK(strip_noise("https://a.b") == "");
    CHECK(strip_noise("see www.example.com today") == "see today");
    CHECK(strip_noise("a   b\t\nc") == "a b c");
    CHECK(strip_noise("  padded  ") == "padded");
}

TEST_CASE("strip_hashtag_symbol keeps the tag word") {
    CHECK(strip_hashtag_symbol("Wear mask to protect yourself from #COVID-19 #corona") ==
          "Wear mask to protect yourself from COVID-19 corona");
    CHECK(strip_hashtag_symbol("no tags here") == "no tags here");
    CHECK(strip_hashtag_symbol("##double") == "double");
}

TEST_CASE("remove_emojis filters configured codepoint ranges") {
    CHECK(remove_emojis("stay safe \xF0\x9F\x98\xB7") == "stay safe ");
    CHECK(remove_emojis("abc") == "abc");
    CHECK(remove_emojis("\xF0\x9F\x87\xAB\xF0\x9F\x87\xB7 France") == " France");
    CHECK(remove_emojis("sun \xE2\x98\x80\xEF\xB8\x8F out") == "sun  out");
}

TEST_CASE("remove_stopwords drops case-folded matches") {
    StopwordTable t = en_table({"the", "is"});
    CHECK(remove_stopwords("the mask is new", "en", t) == "mask new");
    CHECK(remove_stopwords("The mask IS new", "en", t) == "mask new");

    StopwordTable de;
    de.add("de", {"das", "ist"});
    CHECK(remove_stopwords("das ist gut", "de", de) == "gut");
}

TEST_CASE("missing stopword table passes text through with a warning") {
    StopwordTable t;
    bool warned = false;
    const std::string thai = "\xE0\xB8\xAA\xE0\xB8\xA7\xE0\xB8\xB1\xE0\xB8\xAA\xE0\xB8\x94\xE0\xB8\xB5";
    CHECK(remove_stopwords(thai, "th", t, &warned) == thai);
    CHECK(warned);
}

TEST_CASE("clean composes the four steps in order") {
    StopwordTable empty_en = en_table({});
    const CleanText ct =
        clean(make_record("RT @a Wear mask! #corona \xF0\x9F\x98\xB7 https://t.co/x"), empty_en);
    CHECK(ct.text == "Wear mask! corona");
    CHECK_FALSE(ct.emptied);
    REQUIRE(ct.applied_steps.size() >= 4);
    CHECK(ct.applied_steps[0] == "strip_noise");
    CHECK(ct.applied_steps[1] == "strip_hashtag_symbol");
    CHECK(ct.applied_steps[2] == "remove_emojis");
    CHECK(ct.applied_steps[3].rfind("remove_stopwords", 0) == 0);
}

TEST_CASE("clean is a fixed point on already-clean text") {
    StopwordTable t;
    const CleanText ct = clean(make_record("plain clean words"), t);
    CHECK(ct.text == "plain clean words");
}

TEST_CASE("url-only input empties and is flagged") {
    StopwordTable t;
    const CleanText ct = clean(make_record("https://only.example/x"), t);
    CHECK(ct.text.empty());
    CHECK(ct.emptied);
}

TEST_CASE("hashtag stripping precedes stopword removal") {
    StopwordTable t = en_table({"the"});
    const CleanText ct = clean(make_record("#the mask"), t);
    CHECK(ct.text == "mask");
}

TEST_CASE("clean output characters are a subset of the input") {
    std::mt19937_64 rng(4242);
    const std::vector<std::string> pieces = {
        "hello",  "#tag",     "@user",   "https://t.co/abc", "world",
        "\xF0\x9F\x98\xB7",  "RT",      "www.x.org",        "COVID-19",
        "\xC3\xA9t\xC3\xA9", "#a-b_c",  "mask!",
    };
    StopwordTable t = en_table({"the", "a"});
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            text += pieces[rng() % pieces.size()];
        }
        const CleanText ct = clean(make_record(text), t);
        std::set<char32_t> in_chars, out_chars;
        for (char32_t c : utf8_decode(text)) in_chars.insert(c);
        for (char32_t c : utf8_decode(ct.text))
            if (c != U' ') out_chars.insert(c);
        for (char32_t c : out_chars) CHECK(in_chars.count(c) == 1);
    }
}

TEST_CASE("clean is idempotent on mixed noisy input") {
    std::mt19937_64 rng(777);
    const std::vector<std::string> pieces = {
        "hello", "#tag",  "@user", "https://t.co/abc", "world", "\xF0\x9F\x98\xB7",
        "the",   "masks", "#covid", "great",            "again",
    };
    StopwordTable t = en_table({"the", "is"});
    for (int trial = 0; trial < 300; ++trial) {
        std::string text = trial % 3 == 0 ? "RT " : "";
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            text += pieces[rng() % pieces.size()];
        }
        const CleanText once = clean(make_record(text), t);
        const CleanText twice = clean(make_record(once.text), t);
        CHECK(twice.text == once.text);
    }
}

TEST_CASE("script segmentation splits runs at script boundaries") {
    const auto segs = segment_by_script("abc\xE0\xB8\x81\xE0\xB8\x82xyz");
    REQUIRE(segs.size() == 3);
    CHECK(segs[0] == "abc");
    CHECK(segs[2] == "xyz");
    const auto plain = segment_by_script("two words");
    REQUIRE(plain.size() == 2);
    CHECK(plain[0] == "two");
}

TEST_CASE("stopword files load with comments ignored") {
    const std::string dir = std::string(CMTA_DATA_DIR) + "/stopwords";
    const StopwordTable t = StopwordTable::load_dir(dir);
    CHECK(t.has("en"));
    CHECK(t.has("es"));
    CHECK(t.find("en")->count("the") == 1);
    CHECK(t.find("en")->count("# English stopwords") == 0);
    const CleanText ct = clean(make_record("the mask works"), t);
    CHECK(ct.text == "mask works");
}
