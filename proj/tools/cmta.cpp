// cmta: multilingual misinformation classification pipeline CLI.
//
// Commands: prep, build-vocab, train, eval, classify, analyze, compare.
// Exit codes: 0 success, 1 validation failure, 2 runtime failure.
// Option precedence: command-line flag > CMTA_* environment variable >
// config file > built-in default. Environment overrides exist for paths only.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cmta/analyze.hpp"
#include "cmta/corpus.hpp"
#include "cmta/fixtures.hpp"
#include "cmta/pipeline.hpp"
#include "cmta/preprocess.hpp"
#include "cmta/tokenizer.hpp"
#include "cmta/train.hpp"
#include "cmta/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cmta;

namespace {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string dataset;
    std::string vocab;
    std::string checkpoint;
    std::string stopwords;
    std::string output_dir = ".";
    uint64_t seed = 0;
    ModelConfig model;
    TrainConfig train;
    SplitSpec split;
};

void apply_model_json(ModelConfig& m, const json& j) {
    static const std::set<std::string> known = {
        "vocab_size", "max_len", "hidden", "layers", "heads", "ff_dim",
        "conv_channels", "conv_kernel", "avg_pool", "max_pool", "dropout",
        "dense_dims", "num_classes", "tap_layer"};
    for (const auto& [key, val] : j.items())
        if (!known.count(key)) throw ValidationError("unknown model config key: " + key);
    if (j.contains("vocab_size")) m.vocab_size = j["vocab_size"].get<int>();
    if (j.contains("max_len")) m.max_len = j["max_len"].get<int>();
    if (j.contains("hidden")) m.hidden = j["hidden"].get<int>();
    if (j.contains("layers")) m.layers = j["layers"].get<int>();
    if (j.contains("heads")) m.heads = j["heads"].get<int>();
    if (j.contains("ff_dim")) m.ff_dim = j["ff_dim"].get<int>();
    if (j.contains("conv_channels")) m.conv_channels = j["conv_channels"].get<std::vector<int>>();
    if (j.contains("conv_kernel")) m.conv_kernel = j["conv_kernel"].get<int>();
    if (j.contains("avg_pool")) m.avg_pool = j["avg_pool"].get<int>();
    if (j.contains("max_pool")) m.max_pool = j["max_pool"].get<int>();
    if (j.contains("dropout")) m.dropout = j["dropout"].get<double>();
    if (j.contains("dense_dims")) m.dense_dims = j["dense_dims"].get<std::vector<int>>();
    if (j.contains("num_classes")) m.num_classes = j["num_classes"].get<int>();
    if (j.contains("tap_layer")) m.tap_layer = j["tap_layer"].get<int>();
}

void apply_train_json(TrainConfig& t, const json& j) {
    static const std::set<std::string> known = {"batch_size", "epochs", "lr", "weight_decay",
                                               "beta1", "beta2", "adam_eps"};
    for (const auto& [key, val] : j.items())
        if (!known.count(key)) throw ValidationError("unknown train config key: " + key);
    if (j.contains("batch_size")) t.batch_size = j["batch_size"].get<int>();
    if (j.contains("epochs")) t.epochs = j["epochs"].get<int>();
    if (j.contains("lr")) t.lr = j["lr"].get<float>();
    if (j.contains("weight_decay")) t.weight_decay = j["weight_decay"].get<float>();
    if (j.contains("beta1")) t.beta1 = j["beta1"].get<float>();
    if (j.contains("beta2")) t.beta2 = j["beta2"].get<float>();
    if (j.contains("adam_eps")) t.adam_eps = j["adam_eps"].get<float>();
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error: " + std::string(e.what()));
    }
    static const std::set<std::string> known = {"dataset", "vocab",      "checkpoint",
                                               "stopwords", "output_dir", "seed",
                                               "model",   "train"};
    for (const auto& [key, val] : j.items())
        if (!known.count(key)) throw ValidationError("unknown config key: " + key);
    if (j.contains("dataset")) cfg.dataset = j["dataset"].get<std::string>();
    if (j.contains("vocab")) cfg.vocab = j["vocab"].get<std::string>();
    if (j.contains("checkpoint")) cfg.checkpoint = j["checkpoint"].get<std::string>();
    if (j.contains("stopwords")) cfg.stopwords = j["stopwords"].get<std::string>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("model")) apply_model_json(cfg.model, j["model"]);
    if (j.contains("train")) apply_train_json(cfg.train, j["train"]);
    return cfg;
}

void apply_env_paths(RunConfig& cfg) {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        return v ? std::optional<std::string>(v) : std::nullopt;
    };
    if (auto v = env("CMTA_DATASET")) cfg.dataset = *v;
    if (auto v = env("CMTA_VOCAB")) cfg.vocab = *v;
    if (auto v = env("CMTA_CHECKPOINT")) cfg.checkpoint = *v;
    if (auto v = env("CMTA_STOPWORDS")) cfg.stopwords = *v;
    if (auto v = env("CMTA_OUTPUT_DIR")) cfg.output_dir = *v;
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ValidationError(what + " path not set");
    if (!fs::exists(path)) throw ValidationError(what + " not found: " + path);
}

StopwordTable load_stopwords_or_default(const std::string& dir) {
    if (!dir.empty()) return StopwordTable::load_dir(dir);
    const std::string fallback = std::string(CMTA_DATA_DIR) + "/stopwords";
    if (fs::is_directory(fallback)) return StopwordTable::load_dir(fallback);
    return {};
}

// JSONL line -> record; a "clean_text" field, when present, replaces the text.
TextRecord parse_pipeline_record(const std::string& line, size_t line_no,
                                 const LoadOptions& opts, std::string* pred_out = nullptr) {
    TextRecord rec = record_from_json_line(line, line_no, opts);
    const json j = json::parse(line);
    if (j.contains("clean_text") && j["clean_text"].is_string()) {
        const std::string ct = j["clean_text"].get<std::string>();
        if (!ct.empty()) rec.raw_text = ct;
    }
    if (pred_out && j.contains("pred") && j["pred"].is_string())
        *pred_out = j["pred"].get<std::string>();
    return rec;
}

std::vector<TextRecord> load_pipeline_dataset(const std::string& path, bool strict = false) {
    LoadOptions opts;
    opts.strict = strict;
    std::vector<TextRecord> records;
    const auto lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            records.push_back(parse_pipeline_record(lines[i], i + 1, opts));
        } catch (const std::exception& e) {
            if (strict) throw;
            std::cerr << "warning: skipping line " << (i + 1) << ": " << e.what() << "\n";
        }
    }
    return records;
}

bool g_error_json = false;
bool g_dry_run = false;

int fail(int code, const std::string& message) {
    if (g_error_json) {
        json j;
        j["error"] = message;
        j["exit_code"] = code;
        std::cout << j.dump() << "\n";
    } else {
        std::cerr << "error: " << message << "\n";
    }
    return code;
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ValidationError& e) {
        return fail(1, e.what());
    } catch (const CLI::ParseError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        return fail(1, e.what());
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }
}

void announce_seed(uint64_t seed) { std::cout << "seed: " << seed << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmta: multilingual misinformation classification pipeline"};
    app.require_subcommand(1);
    app.add_flag("--error-json", g_error_json, "emit failures as machine-readable JSON");
    app.add_flag("--dry-run", g_dry_run,
                 "validate configuration, print the execution plan, write nothing");

    // ---- prep ----
    auto* prep = app.add_subcommand("prep", "clean raw JSONL records");
    std::string prep_in, prep_out, prep_stop;
    bool prep_strict = false;
    prep->add_option("--in", prep_in, "input JSONL")->required();
    prep->add_option("--out", prep_out, "output JSONL with clean_text field")->required();
    prep->add_option("--stopwords", prep_stop, "stopword directory");
    prep->add_flag("--strict", prep_strict, "abort on first malformed row");

    // ---- build-vocab ----
    auto* bv = app.add_subcommand("build-vocab", "train a WordPiece vocabulary");
    std::string bv_in, bv_out;
    int bv_size = 8000;
    std::string bv_field = "clean_text";
    bv->add_option("--in", bv_in, "input JSONL")->required();
    bv->add_option("--size", bv_size, "target vocabulary size");
    bv->add_option("--out", bv_out, "output vocab file")->required();
    bv->add_option("--field", bv_field, "text field to read (clean_text falls back to text)");

    // shared config-style options for the heavier commands
    std::string cfg_path, opt_dataset, opt_vocab, opt_checkpoint, opt_stopwords, opt_outdir;
    std::optional<uint64_t> opt_seed;
    std::optional<int> opt_epochs, opt_batch;
    std::optional<float> opt_lr;
    int opt_workers = 1;
    auto add_common = [&](CLI::App* cmd, bool with_train_opts) {
        cmd->add_option("--config", cfg_path, "JSON config file");
        cmd->add_option("--dataset", opt_dataset, "dataset JSONL path");
        cmd->add_option("--vocab", opt_vocab, "vocab file path");
        cmd->add_option("--checkpoint", opt_checkpoint, "checkpoint path");
        cmd->add_option("--stopwords", opt_stopwords, "stopword directory");
        cmd->add_option("--out-dir", opt_outdir, "output directory");
        cmd->add_option("--seed", opt_seed, "root seed (all randomness derives from it)");
        if (with_train_opts) {
            cmd->add_option("--epochs", opt_epochs, "training epochs");
            cmd->add_option("--batch-size", opt_batch, "batch size");
            cmd->add_option("--lr", opt_lr, "learning rate");
        }
    };

    auto* train_cmd = app.add_subcommand("train", "train the classifier");
    add_common(train_cmd, true);
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on labeled data");
    add_common(eval_cmd, false);
    auto* classify_cmd = app.add_subcommand("classify", "label a corpus with a checkpoint");
    add_common(classify_cmd, false);
    classify_cmd->add_option("--workers", opt_workers, "worker threads");
    std::string classify_out;
    classify_cmd->add_option("--out", classify_out, "labeled output JSONL");
    auto* analyze_cmd = app.add_subcommand("analyze", "aggregate labeled records");
    std::string an_in, an_csv, an_json;
    bool an_bars = false;
    analyze_cmd->add_option("--in", an_in, "labeled JSONL (classify output)")->required();
    analyze_cmd->add_option("--out-csv", an_csv, "aggregation CSV path");
    analyze_cmd->add_option("--out-json", an_json, "aggregation JSON path");
    analyze_cmd->add_flag("--bars", an_bars, "print a text bar chart");
    auto* compare_cmd = app.add_subcommand("compare",
                                           "monolingual-vs-multilingual comparison harness");
    add_common(compare_cmd, true);

    CLI11_PARSE(app, argc, argv);

    auto resolve = [&](bool with_seed_default = true) {
        RunConfig cfg = load_run_config(cfg_path);
        apply_env_paths(cfg);
        if (!opt_dataset.empty()) cfg.dataset = opt_dataset;
        if (!opt_vocab.empty()) cfg.vocab = opt_vocab;
        if (!opt_checkpoint.empty()) cfg.checkpoint = opt_checkpoint;
        if (!opt_stopwords.empty()) cfg.stopwords = opt_stopwords;
        if (!opt_outdir.empty()) cfg.output_dir = opt_outdir;
        if (opt_seed) cfg.seed = *opt_seed;
        if (opt_epochs) cfg.train.epochs = *opt_epochs;
        if (opt_batch) cfg.train.batch_size = *opt_batch;
        if (opt_lr) cfg.train.lr = *opt_lr;
        cfg.train.seed = cfg.seed;
        cfg.split.seed = cfg.seed;
        (void)with_seed_default;
        return cfg;
    };

    if (*prep) {
        return run_guarded([&] {
            require_file(prep_in, "input");
            const StopwordTable stopwords = load_stopwords_or_default(prep_stop);
            if (g_dry_run) {
                std::cout << "plan: prep " << prep_in << " -> " << prep_out << "\n";
                return;
            }
            const auto lines = read_lines(prep_in);
            LoadOptions opts;
            opts.strict = prep_strict;
            std::string out;
            size_t kept = 0, emptied = 0, warnings = 0;
            for (size_t i = 0; i < lines.size(); ++i) {
                if (trim(lines[i]).empty()) continue;
                TextRecord rec;
                try {
                    rec = record_from_json_line(lines[i], i + 1, opts);
                } catch (const std::exception& e) {
                    if (prep_strict) throw;
                    ++warnings;
                    std::cerr << "warning: line " << (i + 1) << ": " << e.what() << "\n";
                    continue;
                }
                const CleanText ct = clean(rec, stopwords);
                if (ct.emptied) ++emptied;
                json j = json::parse(record_to_json_line(rec));
                j["clean_text"] = ct.text;
                out += j.dump();
                out += '\n';
                ++kept;
            }
            write_file(prep_out, out);
            std::cout << "prep: records=" << kept << " emptied=" << emptied
                      << " warnings=" << warnings << "\n";
        });
    }

    if (*bv) {
        return run_guarded([&] {
            require_file(bv_in, "input");
            if (g_dry_run) {
                std::cout << "plan: build-vocab " << bv_in << " size=" << bv_size << " -> "
                          << bv_out << "\n";
                return;
            }
            std::vector<std::string> corpus;
            const auto lines = read_lines(bv_in);
            for (const auto& line : lines) {
                if (trim(line).empty()) continue;
                const json j = json::parse(line);
                std::string text;
                if (j.contains(bv_field) && j[bv_field].is_string())
                    text = j[bv_field].get<std::string>();
                else if (j.contains("text") && j["text"].is_string())
                    text = j["text"].get<std::string>();
                if (!text.empty()) corpus.push_back(text);
            }
            const Vocab vocab = build_vocab(corpus, bv_size);
            vocab.save(bv_out);
            std::cout << "build-vocab: size=" << vocab.size() << " -> " << bv_out << "\n";
        });
    }

    if (*train_cmd) {
        return run_guarded([&] {
            RunConfig cfg = resolve();
            require_file(cfg.dataset, "dataset");
            require_file(cfg.vocab, "vocab");
            announce_seed(cfg.seed);
            if (g_dry_run) {
                std::cout << "plan: train dataset=" << cfg.dataset << " vocab=" << cfg.vocab
                          << " epochs=" << cfg.train.epochs << " out=" << cfg.output_dir
                          << "\n";
                return;
            }
            fs::create_directories(cfg.output_dir);
            const Vocab vocab = Vocab::load(cfg.vocab);
            cfg.model.vocab_size = vocab.size();
            auto records = load_pipeline_dataset(cfg.dataset);
            const Split split = split_dataset(records, cfg.split);
            Model model(cfg.model, cfg.seed);
            cfg.train.final_checkpoint_path = cfg.output_dir + "/checkpoint.bin";
            cfg.train.best_checkpoint_path = cfg.output_dir + "/checkpoint_best.bin";
            cfg.train.history_path = cfg.output_dir + "/history.csv";
            const TrainResult result = train(model, vocab, split.train, split.val, cfg.train);
            const EvalResult test_eval = evaluate(model, vocab, split.test);
            write_file(cfg.output_dir + "/metrics.csv", metrics_to_csv(test_eval.metrics));
            write_file(cfg.output_dir + "/predictions.jsonl", test_eval.rows_to_jsonl());
            std::cout << "train: epochs=" << result.meta.epochs_run
                      << " final_loss=" << result.meta.final_train_loss
                      << " test_acc=" << test_eval.metrics.accuracy << "\n";
        });
    }

    if (*eval_cmd) {
        return run_guarded([&] {
            RunConfig cfg = resolve();
            require_file(cfg.checkpoint, "checkpoint");
            require_file(cfg.vocab, "vocab");
            require_file(cfg.dataset, "dataset");
            announce_seed(cfg.seed);
            if (g_dry_run) {
                std::cout << "plan: eval checkpoint=" << cfg.checkpoint
                          << " dataset=" << cfg.dataset << "\n";
                return;
            }
            fs::create_directories(cfg.output_dir);
            const Vocab vocab = Vocab::load(cfg.vocab);
            const Model model = load_checkpoint_checked(cfg.checkpoint, vocab);
            const auto records = load_pipeline_dataset(cfg.dataset);
            const EvalResult res = evaluate(model, vocab, records);
            write_file(cfg.output_dir + "/metrics.csv", metrics_to_csv(res.metrics));
            write_file(cfg.output_dir + "/predictions.jsonl", res.rows_to_jsonl());
            std::cout << "eval: n=" << res.metrics.total << " acc=" << res.metrics.accuracy
                      << " macro_f1=" << res.metrics.macro_f1 << "\n";
        });
    }

    if (*classify_cmd) {
        return run_guarded([&] {
            RunConfig cfg = resolve();
            require_file(cfg.checkpoint, "checkpoint");
            require_file(cfg.vocab, "vocab");
            require_file(cfg.dataset, "dataset");
            if (classify_out.empty()) classify_out = cfg.output_dir + "/labeled.jsonl";
            announce_seed(cfg.seed);
            if (g_dry_run) {
                std::cout << "plan: classify dataset=" << cfg.dataset << " workers="
                          << opt_workers << " -> " << classify_out << "\n";
                return;
            }
            fs::create_directories(cfg.output_dir);
            const Vocab vocab = Vocab::load(cfg.vocab);
            const Model model = load_checkpoint_checked(cfg.checkpoint, vocab);
            const StopwordTable stopwords = load_stopwords_or_default(cfg.stopwords);
            const auto records = load_pipeline_dataset(cfg.dataset);
            const auto t0 = std::chrono::steady_clock::now();
            const auto labeled =
                classify_corpus(model, vocab, stopwords, records, opt_workers);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::string out;
            long failed = 0;
            for (const auto& lr : labeled) {
                json j = json::parse(record_to_json_line(lr.record));
                if (lr.ok) {
                    j["pred"] = class_name(lr.predicted);
                    j["probs"] = lr.probs;
                } else {
                    j["error"] = lr.error;
                    ++failed;
                }
                out += j.dump();
                out += '\n';
            }
            write_file(classify_out, out);
            std::cout << "classify: n=" << labeled.size() << " failed=" << failed
                      << " throughput=" << (secs > 0 ? static_cast<double>(labeled.size()) / secs
                                                     : 0.0)
                      << " rec/s\n";
        });
    }

    if (*analyze_cmd) {
        return run_guarded([&] {
            require_file(an_in, "input");
            if (g_dry_run) {
                std::cout << "plan: analyze " << an_in << "\n";
                return;
            }
            std::vector<LabeledRecord> labeled;
            const auto lines = read_lines(an_in);
            LoadOptions opts;
            for (size_t i = 0; i < lines.size(); ++i) {
                if (trim(lines[i]).empty()) continue;
                LabeledRecord lr;
                std::string pred;
                try {
                    lr.record = parse_pipeline_record(lines[i], i + 1, opts, &pred);
                    const auto cls = parse_class(pred);
                    if (!cls) throw FormatError(i + 1, "missing or bad pred field");
                    lr.predicted = *cls;
                } catch (const std::exception& e) {
                    lr.ok = false;
                    lr.error = e.what();
                }
                labeled.push_back(std::move(lr));
            }
            const AggregateResult agg = aggregate(labeled);
            if (!an_csv.empty()) write_file(an_csv, emit_report(agg, ReportFormat::Csv));
            if (!an_json.empty()) write_file(an_json, emit_report(agg, ReportFormat::Json));
            if (an_bars) std::cout << emit_report(agg, ReportFormat::TextBarChart);
            std::cout << "analyze: records=" << labeled.size() << " cells=" << agg.cells.size()
                      << " skipped=" << agg.skipped << "\n";
        });
    }

    if (*compare_cmd) {
        return run_guarded([&] {
            RunConfig cfg = resolve();
            require_file(cfg.dataset, "dataset");
            require_file(cfg.vocab, "vocab");
            announce_seed(cfg.seed);
            if (g_dry_run) {
                std::cout << "plan: compare dataset=" << cfg.dataset << "\n";
                return;
            }
            fs::create_directories(cfg.output_dir);
            const Vocab vocab = Vocab::load(cfg.vocab);
            cfg.model.vocab_size = vocab.size();
            auto records = load_pipeline_dataset(cfg.dataset);
            const Split split = split_dataset(records, cfg.split);
            std::set<std::string> langs;
            for (const auto& r : records) langs.insert(r.language);
            std::vector<ModelSpec> specs;
            for (const auto& lang : langs) specs.push_back({"mono-" + lang, lang});
            specs.push_back({"multilingual", ""});
            const ComparisonReport report = compare_models(
                specs, cfg.model, vocab, split.train, split.val, split.test, cfg.train);
            write_file(cfg.output_dir + "/comparison.csv", report.to_csv());
            write_file(cfg.output_dir + "/comparison.txt", report.to_text());
            std::cout << report.to_text();
        });
    }

    return 0;
}
