#include "cmta/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "cmta/pipeline.hpp"
#include "cmta/util.hpp"
#include "json.hpp"

namespace cmta {

namespace {

uint64_t mix64(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
    return mix64(mix64(seed ^ mix64(a)) ^ mix64(b));
}

}  // namespace

Metrics compute_metrics(const std::vector<MisinfoClass>& preds,
                        const std::vector<MisinfoClass>& golds) {
    if (preds.size() != golds.size())
        throw LengthMismatch("compute_metrics: prediction/gold length mismatch");
    if (preds.empty()) throw LengthMismatch("compute_metrics: empty inputs");
    Metrics m;
    m.total = static_cast<long>(preds.size());
    for (size_t i = 0; i < preds.size(); ++i)
        ++m.confusion[static_cast<size_t>(golds[i])][static_cast<size_t>(preds[i])];
    long correct = 0;
    for (int c = 0; c < 3; ++c) correct += m.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)];
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);
    for (int c = 0; c < 3; ++c) {
        long tp = m.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)];
        long pred_c = 0, gold_c = 0;
        for (int o = 0; o < 3; ++o) {
            pred_c += m.confusion[static_cast<size_t>(o)][static_cast<size_t>(c)];
            gold_c += m.confusion[static_cast<size_t>(c)][static_cast<size_t>(o)];
        }
        const double p = pred_c ? static_cast<double>(tp) / static_cast<double>(pred_c) : 0.0;
        const double r = gold_c ? static_cast<double>(tp) / static_cast<double>(gold_c) : 0.0;
        m.precision[static_cast<size_t>(c)] = p;
        m.recall[static_cast<size_t>(c)] = r;
        m.f1[static_cast<size_t>(c)] = (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    for (int c = 0; c < 3; ++c) {
        m.macro_precision += m.precision[static_cast<size_t>(c)] / 3.0;
        m.macro_recall += m.recall[static_cast<size_t>(c)] / 3.0;
        m.macro_f1 += m.f1[static_cast<size_t>(c)] / 3.0;
    }
    return m;
}

std::string TrainHistory::to_csv() const {
    std::ostringstream out;
    out << "epoch,loss,train_acc,val_acc,seconds\n";
    for (const auto& e : epochs)
        out << e.epoch << "," << e.train_loss << "," << e.train_accuracy << ","
            << e.val_accuracy << "," << e.seconds << "\n";
    return out.str();
}

void TrainHistory::save_csv(const std::string& path) const { write_file(path, to_csv()); }

namespace {

double accuracy_on(const Model& model, const std::vector<TokenSequence>& seqs,
                   const std::vector<int>& golds) {
    std::mt19937_64 rng(0);
    long correct = 0;
    for (size_t i = 0; i < seqs.size(); ++i) {
        nn::Tensor probs = model.forward(seqs[i], nn::DropoutMode::Eval, rng);
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (probs.data()[static_cast<size_t>(c)] > probs.data()[static_cast<size_t>(best)])
                best = c;
        if (best == golds[i]) ++correct;
    }
    return seqs.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(seqs.size());
}

}  // namespace

TrainResult train(Model& model, const Vocab& vocab, const std::vector<TextRecord>& train_set,
                  const std::vector<TextRecord>& val_set, const TrainConfig& cfg) {
    if (train_set.empty()) throw EmptyDataset("train: empty training set");
    if (cfg.batch_size < 1 || cfg.epochs < 1)
        throw std::invalid_argument("train: batch_size and epochs must be >= 1");

    const int max_len = model.config().max_len;
    auto encode_set = [&](const std::vector<TextRecord>& recs, std::vector<TokenSequence>& seqs,
                          std::vector<int>& golds) {
        for (const auto& rec : recs) {
            if (!rec.gold_class) throw MissingLabel("train: record lacks gold class: " + rec.id);
            seqs.push_back(encode(rec.raw_text, vocab, max_len));
            golds.push_back(static_cast<int>(*rec.gold_class));
        }
    };
    std::vector<TokenSequence> train_seqs, val_seqs;
    std::vector<int> train_golds, val_golds;
    encode_set(train_set, train_seqs, train_golds);
    encode_set(val_set, val_seqs, val_golds);

    nn::AdamWConfig<float> ocfg;
    ocfg.lr = cfg.lr;
    ocfg.beta1 = cfg.beta1;
    ocfg.beta2 = cfg.beta2;
    ocfg.eps = cfg.adam_eps;
    ocfg.weight_decay = cfg.weight_decay;
    nn::AdamW<float> optimizer(ocfg, model.parameters());

    TrainResult result;
    double best_val_acc = -1.0;
    const size_t n = train_seqs.size();

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<size_t> perm(n);
        for (size_t i = 0; i < n; ++i) perm[i] = i;
        std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, static_cast<uint64_t>(epoch)));
        std::shuffle(perm.begin(), perm.end(), shuffle_rng);

        double loss_sum = 0;
        long loss_count = 0;
        for (size_t start = 0; start < n; start += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(n, start + static_cast<size_t>(cfg.batch_size));
            const float inv_batch = 1.0f / static_cast<float>(end - start);
            optimizer.zero_grad();
            for (size_t bi = start; bi < end; ++bi) {
                const size_t idx = perm[bi];
                std::mt19937_64 drop_rng(
                    derive_seed(cfg.seed, static_cast<uint64_t>(epoch), idx + 1));
                nn::Tensor loss = model.loss(train_seqs[idx], train_golds[idx],
                                             nn::DropoutMode::Train, drop_rng);
                const float lv = loss.item();
                if (!std::isfinite(static_cast<double>(lv)))
                    throw TrainingDiverged("loss is not finite at epoch " +
                                           std::to_string(epoch));
                loss_sum += static_cast<double>(lv);
                ++loss_count;
                loss.backward(inv_batch);  // mean loss over the batch
            }
            optimizer.step();
            ++result.optimizer_steps;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
        stats.train_accuracy = accuracy_on(model, train_seqs, train_golds);
        if (cfg.eval_every_epoch && !val_seqs.empty()) {
            stats.val_accuracy = accuracy_on(model, val_seqs, val_golds);
            if (stats.val_accuracy > best_val_acc) {
                best_val_acc = stats.val_accuracy;
                if (!cfg.best_checkpoint_path.empty()) {
                    CheckpointMeta meta;
                    meta.epochs_run = epoch;
                    meta.final_train_loss = stats.train_loss;
                    meta.final_val_accuracy = stats.val_accuracy;
                    save_checkpoint(model, vocab.content_hash(), cfg.best_checkpoint_path, meta);
                }
            }
        }
        stats.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.epochs.push_back(stats);

        if (cfg.stop_at_train_accuracy && stats.train_accuracy >= *cfg.stop_at_train_accuracy)
            break;
    }

    const auto& last = result.history.epochs.back();
    result.meta.epochs_run = last.epoch;
    result.meta.final_train_loss = last.train_loss;
    result.meta.final_val_accuracy = last.val_accuracy;
    if (!cfg.final_checkpoint_path.empty())
        save_checkpoint(model, vocab.content_hash(), cfg.final_checkpoint_path, result.meta);
    if (!cfg.history_path.empty()) result.history.save_csv(cfg.history_path);
    return result;
}

EvalResult evaluate(const Model& model, const Vocab& vocab,
                    const std::vector<TextRecord>& dataset) {
    EvalResult res;
    std::vector<MisinfoClass> preds, golds;
    for (const auto& rec : dataset) {
        if (!rec.gold_class) throw MissingLabel("evaluate: record lacks gold class: " + rec.id);
        const Prediction p = predict_clean(rec.raw_text, vocab, model);
        preds.push_back(p.cls);
        golds.push_back(*rec.gold_class);
        res.rows.push_back({rec.id, *rec.gold_class, p.cls, p.probs});
    }
    res.metrics = compute_metrics(preds, golds);
    return res;
}

std::string EvalResult::rows_to_jsonl() const {
    std::string out;
    for (const auto& row : rows) {
        nlohmann::json j;
        j["id"] = row.id;
        j["gold"] = class_name(row.gold);
        j["pred"] = class_name(row.pred);
        j["probs"] = row.probs;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string metrics_to_csv(const Metrics& m) {
    std::ostringstream out;
    out << "metric,false,partially_false,misleading,macro\n";
    out << "precision";
    for (double v : m.precision) out << "," << v;
    out << "," << m.macro_precision << "\n";
    out << "recall";
    for (double v : m.recall) out << "," << v;
    out << "," << m.macro_recall << "\n";
    out << "f1";
    for (double v : m.f1) out << "," << v;
    out << "," << m.macro_f1 << "\n";
    out << "accuracy," << m.accuracy << ",,,\n";
    out << "total," << m.total << ",,,\n";
    return out.str();
}

namespace {

std::vector<TextRecord> filter_language(const std::vector<TextRecord>& recs,
                                        const std::string& lang) {
    if (lang.empty()) return recs;
    std::vector<TextRecord> out;
    for (const auto& r : recs)
        if (r.language == lang) out.push_back(r);
    return out;
}

}  // namespace

ComparisonReport compare_models(const std::vector<ModelSpec>& specs, const ModelConfig& mcfg,
                                const Vocab& vocab, const std::vector<TextRecord>& train_set,
                                const std::vector<TextRecord>& val_set,
                                const std::vector<TextRecord>& test_set,
                                const TrainConfig& cfg) {
    ComparisonReport report;
    std::set<std::string> slice_langs;
    for (const auto& r : test_set) slice_langs.insert(r.language);

    for (const auto& spec : specs) {
        const auto tr = filter_language(train_set, spec.language_filter);
        const auto va = filter_language(val_set, spec.language_filter);
        const auto te = filter_language(test_set, spec.language_filter);
        if (tr.empty() || te.empty())
            throw InsufficientData("no data for language slice: " + spec.language_filter);

        Model model(mcfg, cfg.seed);
        TrainConfig local = cfg;
        local.final_checkpoint_path.clear();
        local.best_checkpoint_path.clear();
        local.history_path.clear();
        train(model, vocab, tr, va, local);

        if (spec.language_filter.empty()) {
            const Metrics all = evaluate(model, vocab, te).metrics;
            report.rows.push_back(
                {spec.name, "all", all.macro_precision, all.macro_recall, all.macro_f1});
            for (const auto& lang : slice_langs) {
                const auto slice = filter_language(test_set, lang);
                if (slice.empty()) throw InsufficientData("empty test slice: " + lang);
                const Metrics m = evaluate(model, vocab, slice).metrics;
                report.multilingual_slices.push_back(
                    {spec.name, lang, m.macro_precision, m.macro_recall, m.macro_f1});
            }
        } else {
            const Metrics m = evaluate(model, vocab, te).metrics;
            report.rows.push_back({spec.name, spec.language_filter, m.macro_precision,
                                   m.macro_recall, m.macro_f1});
        }
    }
    return report;
}

std::string ComparisonReport::to_csv() const {
    std::ostringstream out;
    out << "model,eval_slice,macro_precision,macro_recall,macro_f1\n";
    for (const auto& r : rows)
        out << csv_escape(r.model_name) << "," << r.eval_slice << "," << r.macro_precision
            << "," << r.macro_recall << "," << r.macro_f1 << "\n";
    for (const auto& r : multilingual_slices)
        out << csv_escape(r.model_name) << "," << r.eval_slice << "," << r.macro_precision
            << "," << r.macro_recall << "," << r.macro_f1 << "\n";
    return out.str();
}

std::string ComparisonReport::to_text() const {
    std::ostringstream out;
    auto line = [&](const ComparisonRow& r) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-24s %-8s  P=%.4f  R=%.4f  F1=%.4f\n",
                      r.model_name.c_str(), r.eval_slice.c_str(), r.macro_precision,
                      r.macro_recall, r.macro_f1);
        out << buf;
    };
    out << "model                    slice     metrics (macro)\n";
    for (const auto& r : rows) line(r);
    if (!multilingual_slices.empty()) {
        out << "-- multilingual model per language slice --\n";
        for (const auto& r : multilingual_slices) line(r);
    }
    return out.str();
}

}  // namespace cmta
