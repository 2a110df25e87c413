#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cmta/tensor.hpp"
#include "cmta/tokenizer.hpp"

namespace cmta {

struct ModelConfig {
    int vocab_size = 0;
    int max_len = 128;
    int hidden = 64;
    int layers = 2;
    int heads = 2;
    int ff_dim = 0;  // 0 means 4 * hidden
    std::vector<int> conv_channels = {32, 32, 32};
    int conv_kernel = 3;
    int avg_pool = 8;
    int max_pool = 8;
    double dropout = 0.36;
    std::vector<int> dense_dims = {64, 32, 16, 3};
    int num_classes = 3;
    int tap_layer = -1;  // hidden-state index fed to the conv head; -1 = final

    int ff() const { return ff_dim > 0 ? ff_dim : 4 * hidden; }
    void validate() const;

    std::string to_canonical_json() const;
    static ModelConfig from_json(const std::string& json_text);
};

struct VersionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VocabHashMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CorruptFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The CMTA network: embeddings, L-layer transformer encoder exposing all
// hidden states, and the conv + dense classification head.
template <typename S>
class ModelT {
public:
    using Tensor = nn::TensorT<S>;

    ModelT(ModelConfig cfg, uint64_t seed);

    const ModelConfig& config() const { return cfg_; }
    std::vector<Tensor>& parameters() { return param_order_; }
    const std::vector<std::pair<std::string, Tensor>>& named_parameters() const {
        return named_;
    }
    Tensor param(const std::string& name) const;

    // token + segment + position embeddings, layer-normalized. [max_len, H]
    Tensor embed_inputs(const TokenSequence& seq) const;

    // All L+1 hidden states; index 0 is the embedding output.
    std::vector<Tensor> encoder_forward(const Tensor& embeddings,
                                        const std::vector<int>& mask) const;

    // conv1 -> relu -> avg_pool -> conv2 -> relu -> max_pool -> conv3 -> relu
    // -> global_avg_pool -> dropout. [max_len, H] -> [C3]
    Tensor conv_head_forward(const Tensor& last_state, nn::DropoutMode mode,
                             std::mt19937_64& rng) const;

    // Four dense layers ending in num_classes logits.
    Tensor dense_logits(const Tensor& sentence_repr, nn::DropoutMode mode,
                        std::mt19937_64& rng) const;

    Tensor classify(const Tensor& sentence_repr, nn::DropoutMode mode,
                    std::mt19937_64& rng) const;

    // Full forward to class probabilities. Pad rows are zeroed before the
    // conv head so masked positions cannot influence the output.
    Tensor forward(const TokenSequence& seq, nn::DropoutMode mode,
                   std::mt19937_64& rng) const;

    // Fused softmax cross-entropy loss against a gold class.
    Tensor loss(const TokenSequence& seq, int gold, nn::DropoutMode mode,
                std::mt19937_64& rng) const;

private:
    Tensor add_param(const std::string& name, Tensor t);
    Tensor tap_state(const std::vector<Tensor>& states) const;

    ModelConfig cfg_;
    std::vector<std::pair<std::string, Tensor>> named_;
    std::vector<Tensor> param_order_;
};

using Model = ModelT<float>;

struct CheckpointMeta {
    long epochs_run = 0;
    double final_train_loss = 0.0;
    double final_val_accuracy = 0.0;
};

// Binary little-endian container; see save for the exact layout. Round trips
// are bit-exact and guarded by a trailing CRC32.
void save_checkpoint(const Model& model, const std::string& vocab_hash_hex,
                     const std::string& path, const CheckpointMeta& meta = {});

struct LoadedCheckpoint {
    Model model;
    std::string vocab_hash_hex;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

// Loads and verifies the stored vocab hash against `vocab`.
Model load_checkpoint_checked(const std::string& path, const Vocab& vocab,
                              CheckpointMeta* meta_out = nullptr);

// ---- template implementation ----

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::add_param(const std::string& name, Tensor t) {
    t.set_requires_grad(true);
    named_.emplace_back(name, t);
    param_order_.push_back(t);
    return t;
}

template <typename S>
ModelT<S>::ModelT(ModelConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    const int H = cfg_.hidden;
    const S std_init = S(0.02);
    auto randn = [&](std::vector<int> shape) {
        return Tensor::randn(std::move(shape), std_init, rng);
    };
    auto zeros = [&](std::vector<int> shape) { return Tensor::zeros(std::move(shape)); };
    auto ones = [&](std::vector<int> shape) { return Tensor::full(std::move(shape), S(1)); };

    add_param("embed.token", randn({cfg_.vocab_size, H}));
    add_param("embed.segment", randn({2, H}));
    add_param("embed.position", randn({cfg_.max_len, H}));
    add_param("embed.ln.gamma", ones({H}));
    add_param("embed.ln.beta", zeros({H}));

    for (int l = 0; l < cfg_.layers; ++l) {
        const std::string p = "enc" + std::to_string(l) + ".";
        add_param(p + "wq", randn({H, H}));
        add_param(p + "bq", zeros({H}));
        add_param(p + "wk", randn({H, H}));
        add_param(p + "bk", zeros({H}));
        add_param(p + "wv", randn({H, H}));
        add_param(p + "bv", zeros({H}));
        add_param(p + "wo", randn({H, H}));
        add_param(p + "bo", zeros({H}));
        add_param(p + "ln1.gamma", ones({H}));
        add_param(p + "ln1.beta", zeros({H}));
        add_param(p + "ff.w1", randn({H, cfg_.ff()}));
        add_param(p + "ff.b1", zeros({cfg_.ff()}));
        add_param(p + "ff.w2", randn({cfg_.ff(), H}));
        add_param(p + "ff.b2", zeros({H}));
        add_param(p + "ln2.gamma", ones({H}));
        add_param(p + "ln2.beta", zeros({H}));
    }

    int cin = H;
    for (size_t ci = 0; ci < cfg_.conv_channels.size(); ++ci) {
        const int cout = cfg_.conv_channels[ci];
        const std::string p = "conv" + std::to_string(ci + 1) + ".";
        add_param(p + "kernel", randn({cfg_.conv_kernel, cin, cout}));
        add_param(p + "bias", zeros({cout}));
        cin = cout;
    }

    int din = cfg_.conv_channels.back();
    for (size_t di = 0; di < cfg_.dense_dims.size(); ++di) {
        const int dout = cfg_.dense_dims[di];
        const std::string p = "dense" + std::to_string(di + 1) + ".";
        add_param(p + "w", randn({din, dout}));
        add_param(p + "b", zeros({dout}));
        din = dout;
    }
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::param(const std::string& name) const {
    for (const auto& [n, t] : named_)
        if (n == name) return t;
    throw std::out_of_range("no such parameter: " + name);
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::embed_inputs(const TokenSequence& seq) const {
    if (static_cast<int>(seq.ids.size()) != cfg_.max_len)
        throw nn::ShapeMismatch("embed_inputs: sequence length != max_len");
    for (int id : seq.ids)
        if (id < 0 || id >= cfg_.vocab_size)
            throw nn::IndexOutOfRange("embed_inputs: token id out of range");
    std::vector<int> positions(seq.ids.size());
    for (size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
    Tensor tok = nn::embedding_rows(param("embed.token"), seq.ids);
    Tensor seg = nn::embedding_rows(param("embed.segment"), seq.segment_ids);
    Tensor pos = nn::embedding_rows(param("embed.position"), positions);
    Tensor sum = nn::add(nn::add(tok, seg), pos);
    return nn::layernorm(sum, param("embed.ln.gamma"), param("embed.ln.beta"));
}

template <typename S>
std::vector<typename ModelT<S>::Tensor> ModelT<S>::encoder_forward(
    const Tensor& embeddings, const std::vector<int>& mask) const {
    const int H = cfg_.hidden;
    const int dh = H / cfg_.heads;
    const S att_scale = S(1) / static_cast<S>(std::sqrt(static_cast<double>(dh)));
    std::vector<Tensor> states;
    states.push_back(embeddings);
    Tensor x = embeddings;
    for (int l = 0; l < cfg_.layers; ++l) {
        const std::string p = "enc" + std::to_string(l) + ".";
        Tensor q = nn::add_row_broadcast(nn::matmul(x, param(p + "wq")), param(p + "bq"));
        Tensor k = nn::add_row_broadcast(nn::matmul(x, param(p + "wk")), param(p + "bk"));
        Tensor v = nn::add_row_broadcast(nn::matmul(x, param(p + "wv")), param(p + "bv"));
        std::vector<Tensor> heads;
        for (int h = 0; h < cfg_.heads; ++h) {
            Tensor qh = nn::slice_cols(q, h * dh, dh);
            Tensor kh = nn::slice_cols(k, h * dh, dh);
            Tensor vh = nn::slice_cols(v, h * dh, dh);
            Tensor scores = nn::scale(nn::matmul(qh, nn::transpose(kh)), att_scale);
            Tensor attn = nn::row_softmax(scores, mask);
            heads.push_back(nn::matmul(attn, vh));
        }
        Tensor att_out = nn::add_row_broadcast(
            nn::matmul(nn::concat_cols(heads), param(p + "wo")), param(p + "bo"));
        x = nn::layernorm(nn::add(x, att_out), param(p + "ln1.gamma"), param(p + "ln1.beta"));
        Tensor ff = nn::add_row_broadcast(
            nn::matmul(nn::gelu(nn::add_row_broadcast(nn::matmul(x, param(p + "ff.w1")),
                                                      param(p + "ff.b1"))),
                       param(p + "ff.w2")),
            param(p + "ff.b2"));
        x = nn::layernorm(nn::add(x, ff), param(p + "ln2.gamma"), param(p + "ln2.beta"));
        states.push_back(x);
    }
    return states;
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::conv_head_forward(const Tensor& last_state,
                                                        nn::DropoutMode mode,
                                                        std::mt19937_64& rng) const {
    Tensor x = last_state;
    x = nn::relu(nn::conv1d(x, param("conv1.kernel"), param("conv1.bias")));
    x = nn::avg_pool1d(x, cfg_.avg_pool);
    x = nn::relu(nn::conv1d(x, param("conv2.kernel"), param("conv2.bias")));
    x = nn::max_pool1d(x, cfg_.max_pool);
    x = nn::relu(nn::conv1d(x, param("conv3.kernel"), param("conv3.bias")));
    Tensor repr = nn::global_avg_pool(x);
    return nn::dropout(repr, cfg_.dropout, mode, rng);
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::dense_logits(const Tensor& sentence_repr,
                                                   nn::DropoutMode mode,
                                                   std::mt19937_64& rng) const {
    Tensor x = nn::reshape(sentence_repr, {1, sentence_repr.dim(0)});
    for (size_t di = 0; di < cfg_.dense_dims.size(); ++di) {
        const std::string p = "dense" + std::to_string(di + 1) + ".";
        x = nn::add_row_broadcast(nn::matmul(x, param(p + "w")), param(p + "b"));
        if (di + 1 < cfg_.dense_dims.size()) {
            x = nn::relu(x);
            x = nn::dropout(x, cfg_.dropout, mode, rng);
        }
    }
    return nn::reshape(x, {cfg_.num_classes});
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::classify(const Tensor& sentence_repr,
                                               nn::DropoutMode mode,
                                               std::mt19937_64& rng) const {
    return nn::softmax(dense_logits(sentence_repr, mode, rng));
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::tap_state(const std::vector<Tensor>& states) const {
    const int idx = cfg_.tap_layer < 0
                        ? static_cast<int>(states.size()) + cfg_.tap_layer
                        : cfg_.tap_layer;
    return states.at(static_cast<size_t>(idx));
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::forward(const TokenSequence& seq, nn::DropoutMode mode,
                                              std::mt19937_64& rng) const {
    Tensor emb = embed_inputs(seq);
    std::vector<Tensor> states = encoder_forward(emb, seq.attention_mask);
    Tensor tapped = nn::mask_rows(tap_state(states), seq.attention_mask);
    Tensor repr = conv_head_forward(tapped, mode, rng);
    return classify(repr, mode, rng);
}

template <typename S>
typename ModelT<S>::Tensor ModelT<S>::loss(const TokenSequence& seq, int gold,
                                           nn::DropoutMode mode, std::mt19937_64& rng) const {
    Tensor emb = embed_inputs(seq);
    std::vector<Tensor> states = encoder_forward(emb, seq.attention_mask);
    Tensor tapped = nn::mask_rows(tap_state(states), seq.attention_mask);
    Tensor repr = conv_head_forward(tapped, mode, rng);
    return nn::softmax_cross_entropy(dense_logits(repr, mode, rng), gold);
}

}  // namespace cmta
