#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "cmta/util.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using cmta::read_file;
using cmta::write_file;

namespace {

std::string cli() { return CMTA_CLI_PATH; }

int run(const std::string& args, const std::string& out_file = "/dev/null") {
    const std::string cmd = cli() + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / fs::path("cmta_cli_" + std::to_string(rand()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("prep writes a clean_text field for every record") {
    TempDir dir;
    const std::string in = dir.file("in.jsonl");
    const std::string out = dir.file("out.jsonl");
    write_file(in,
               R"({"id":"a","text":"RT @x hello #tag https://t.co/q","language":"en"})"
               "\n"
               R"({"id":"b","text":"plain words","language":"es"})"
               "\n"
               R"({"id":"c","text":"more text","language":"fr"})"
               "\n");
    CHECK(run("prep --in " + in + " --out " + out) == 0);
    const std::string written = read_file(out);
    CHECK(written.find("\"clean_text\"") != std::string::npos);
    size_t lines = 0;
    for (char c : written)
        if (c == '\n') ++lines;
    CHECK(lines == 3);
}

TEST_CASE("prep in partial mode skips malformed rows") {
    TempDir dir;
    const std::string in = dir.file("in.jsonl");
    const std::string out = dir.file("out.jsonl");
    write_file(in,
               R"({"id":"a","text":"one","language":"en"})"
               "\n"
               "this is not json\n"
               R"({"id":"c","text":"three","language":"en"})"
               "\n");
    CHECK(run("prep --in " + in + " --out " + out, dir.file("log.txt")) == 0);
    size_t lines = 0;
    for (char c : read_file(out))
        if (c == '\n') ++lines;
    CHECK(lines == 2);
    CHECK(read_file(dir.file("log.txt")).find("warnings=1") != std::string::npos);
}

TEST_CASE("empty input produces an empty output and exit 0") {
    TempDir dir;
    const std::string in = dir.file("empty.jsonl");
    const std::string out = dir.file("out.jsonl");
    write_file(in, "");
    CHECK(run("prep --in " + in + " --out " + out) == 0);
    CHECK(read_file(out).empty());
}

TEST_CASE("missing input is a validation failure, exit 1") {
    TempDir dir;
    CHECK(run("prep --in " + dir.file("nope.jsonl") + " --out " + dir.file("o")) == 1);
}

TEST_CASE("eval without a checkpoint exits 1 before heavy work") {
    TempDir dir;
    const std::string data = dir.file("d.jsonl");
    write_file(data, R"({"id":"a","text":"x","language":"en","label":"false"})"
                     "\n");
    CHECK(run("eval --dataset " + data + " --vocab " + dir.file("missing.vocab") +
              " --checkpoint " + dir.file("missing.bin")) == 1);
}

TEST_CASE("error-json emits machine-readable failures") {
    TempDir dir;
    const std::string log = dir.file("err.json");
    CHECK(run("--error-json prep --in " + dir.file("nope") + " --out " + dir.file("o"), log) ==
          1);
    const std::string body = read_file(log);
    CHECK(body.find("\"error\"") != std::string::npos);
    CHECK(body.find("\"exit_code\":1") != std::string::npos);
}

TEST_CASE("dry run validates and performs no writes") {
    TempDir dir;
    const std::string in = dir.file("in.jsonl");
    write_file(in, R"({"id":"a","text":"hello","language":"en"})"
                   "\n");
    const std::string out = dir.file("out.jsonl");
    CHECK(run("--dry-run prep --in " + in + " --out " + out, dir.file("plan.txt")) == 0);
    CHECK_FALSE(fs::exists(out));
    CHECK(read_file(dir.file("plan.txt")).find("plan:") != std::string::npos);

    CHECK(run("--dry-run build-vocab --in " + in + " --out " + dir.file("v.txt"),
              dir.file("plan2.txt")) == 0);
    CHECK_FALSE(fs::exists(dir.file("v.txt")));
}

TEST_CASE("build-vocab then a second run is byte-identical") {
    TempDir dir;
    const std::string in = dir.file("in.jsonl");
    write_file(in,
               R"({"id":"a","text":"the cat sat on the mat","language":"en"})"
               "\n"
               R"({"id":"b","text":"that cat scatters","language":"en"})"
               "\n");
    CHECK(run("build-vocab --in " + in + " --size 60 --out " + dir.file("v1.txt")) == 0);
    CHECK(run("build-vocab --in " + in + " --size 60 --out " + dir.file("v2.txt")) == 0);
    CHECK(read_file(dir.file("v1.txt")) == read_file(dir.file("v2.txt")));
}

TEST_CASE("unknown config keys are hard errors") {
    TempDir dir;
    const std::string cfg = dir.file("cfg.json");
    write_file(cfg, R"({"dataset":"x.jsonl","vocob":"typo.txt"})");
    CHECK(run("train --config " + cfg) == 1);

    write_file(cfg, R"({"model":{"hiden":3}})");
    CHECK(run("train --config " + cfg) == 1);
}

TEST_CASE("unknown subcommand or flag fails parsing") {
    CHECK(run("frobnicate") != 0);
    CHECK(run("prep --no-such-flag x") != 0);
}
