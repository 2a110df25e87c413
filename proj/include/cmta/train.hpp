#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cmta/corpus.hpp"
#include "cmta/model.hpp"
#include "cmta/optim.hpp"
#include "cmta/tokenizer.hpp"

namespace cmta {

struct TrainConfig {
    int batch_size = 32;
    int epochs = 10;
    float lr = 1e-4f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float adam_eps = 1e-8f;
    float weight_decay = 0.01f;
    uint64_t seed = 0;
    bool eval_every_epoch = true;
    // Empty paths disable the corresponding artifact.
    std::string final_checkpoint_path;
    std::string best_checkpoint_path;
    std::string history_path;
    // When set, training stops early once train accuracy reaches this value.
    std::optional<double> stop_at_train_accuracy;
};

struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyDataset : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Metrics {
    double accuracy = 0;
    std::array<double, 3> precision{}, recall{}, f1{};
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
    // confusion[gold][pred]
    std::array<std::array<long, 3>, 3> confusion{};
    long total = 0;
};

Metrics compute_metrics(const std::vector<MisinfoClass>& preds,
                        const std::vector<MisinfoClass>& golds);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0;
    double train_accuracy = 0;
    double val_accuracy = 0;
    double seconds = 0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::string to_csv() const;
    void save_csv(const std::string& path) const;
};

struct TrainResult {
    TrainHistory history;
    CheckpointMeta meta;
    long optimizer_steps = 0;
};

// Records must be cleaned text with gold labels; encoding happens here.
TrainResult train(Model& model, const Vocab& vocab, const std::vector<TextRecord>& train_set,
                  const std::vector<TextRecord>& val_set, const TrainConfig& cfg);

struct PredictionRow {
    std::string id;
    MisinfoClass gold;
    MisinfoClass pred;
    std::array<double, 3> probs{};
};

struct EvalResult {
    Metrics metrics;
    std::vector<PredictionRow> rows;
    std::string rows_to_jsonl() const;
};

EvalResult evaluate(const Model& model, const Vocab& vocab,
                    const std::vector<TextRecord>& dataset);

std::string metrics_to_csv(const Metrics& m);

struct ModelSpec {
    std::string name;
    std::string language_filter;  // empty = multilingual (train on everything)
};

struct ComparisonRow {
    std::string model_name;
    std::string eval_slice;  // language code or "all"
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
};

struct ComparisonReport {
    // One row per monolingual model plus the multilingual model on the full
    // test set, in spec order.
    std::vector<ComparisonRow> rows;
    // The multilingual model evaluated on each language slice.
    std::vector<ComparisonRow> multilingual_slices;
    std::string to_csv() const;
    std::string to_text() const;
};

// Trains every spec with identical config and seed; monolingual specs train
// and evaluate on their language slice, the multilingual spec on everything.
ComparisonReport compare_models(const std::vector<ModelSpec>& specs, const ModelConfig& mcfg,
                                const Vocab& vocab, const std::vector<TextRecord>& train_set,
                                const std::vector<TextRecord>& val_set,
                                const std::vector<TextRecord>& test_set,
                                const TrainConfig& cfg);

}  // namespace cmta
