#include <cstring>
#include <fstream>

#include "cmta/model.hpp"
#include "cmta/util.hpp"
#include "json.hpp"

using nlohmann::json;

namespace cmta {

void ModelConfig::validate() const {
    if (vocab_size < 5) throw std::invalid_argument("vocab_size too small");
    if (max_len < 3) throw std::invalid_argument("max_len must be >= 3");
    if (hidden < 1 || layers < 1 || heads < 1) throw std::invalid_argument("bad model dims");
    if (hidden % heads != 0) throw std::invalid_argument("hidden must divide by heads");
    if (conv_channels.size() != 3) throw std::invalid_argument("need exactly 3 conv layers");
    if (conv_kernel < 1 || conv_kernel % 2 == 0)
        throw std::invalid_argument("conv kernel must be odd");
    if (avg_pool < 1 || max_len % avg_pool != 0)
        throw std::invalid_argument("max_len must divide by avg_pool");
    if (max_pool < 1 || (max_len / avg_pool) % max_pool != 0)
        throw std::invalid_argument("max_len/avg_pool must divide by max_pool");
    if (dense_dims.size() != 4) throw std::invalid_argument("need exactly 4 dense layers");
    if (num_classes != 3) throw std::invalid_argument("num_classes is fixed at 3");
    if (dense_dims.back() != num_classes)
        throw std::invalid_argument("last dense width must equal num_classes");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must be in [0,1)");
}

std::string ModelConfig::to_canonical_json() const {
    json j;
    j["vocab_size"] = vocab_size;
    j["max_len"] = max_len;
    j["hidden"] = hidden;
    j["layers"] = layers;
    j["heads"] = heads;
    j["ff_dim"] = ff_dim;
    j["conv_channels"] = conv_channels;
    j["conv_kernel"] = conv_kernel;
    j["avg_pool"] = avg_pool;
    j["max_pool"] = max_pool;
    j["dropout"] = dropout;
    j["dense_dims"] = dense_dims;
    j["num_classes"] = num_classes;
    j["tap_layer"] = tap_layer;
    return j.dump();  // object keys are sorted, so the blob is canonical
}

ModelConfig ModelConfig::from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    ModelConfig cfg;
    cfg.vocab_size = j.at("vocab_size").get<int>();
    cfg.max_len = j.at("max_len").get<int>();
    cfg.hidden = j.at("hidden").get<int>();
    cfg.layers = j.at("layers").get<int>();
    cfg.heads = j.at("heads").get<int>();
    cfg.ff_dim = j.at("ff_dim").get<int>();
    cfg.conv_channels = j.at("conv_channels").get<std::vector<int>>();
    cfg.conv_kernel = j.at("conv_kernel").get<int>();
    cfg.avg_pool = j.at("avg_pool").get<int>();
    cfg.max_pool = j.at("max_pool").get<int>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.dense_dims = j.at("dense_dims").get<std::vector<int>>();
    cfg.num_classes = j.at("num_classes").get<int>();
    cfg.tap_layer = j.at("tap_layer").get<int>();
    return cfg;
}

namespace {

constexpr uint32_t kVersion = 1;
constexpr char kMagic[4] = {'C', 'M', 'T', 'A'};

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_str(std::string& buf, const std::string& s) {
    put_u32(buf, static_cast<uint32_t>(s.size()));
    buf += s;
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > buf.size())
            throw CorruptFile("checkpoint truncated at offset " + std::to_string(pos));
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    std::string raw(size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

json meta_to_json(const CheckpointMeta& meta) {
    json j;
    j["epochs_run"] = meta.epochs_run;
    j["final_train_loss"] = meta.final_train_loss;
    j["final_val_accuracy"] = meta.final_val_accuracy;
    return j;
}

CheckpointMeta meta_from_json(const json& j) {
    CheckpointMeta m;
    m.epochs_run = j.value("epochs_run", 0L);
    m.final_train_loss = j.value("final_train_loss", 0.0);
    m.final_val_accuracy = j.value("final_val_accuracy", 0.0);
    return m;
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& vocab_hash_hex,
                     const std::string& path, const CheckpointMeta& meta) {
    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_str(buf, model.config().to_canonical_json());
    put_str(buf, vocab_hash_hex);
    put_u32(buf, static_cast<uint32_t>(model.named_parameters().size()));
    for (const auto& [name, tensor] : model.named_parameters()) {
        put_str(buf, name);
        buf.push_back(0);  // dtype: float32
        put_u32(buf, static_cast<uint32_t>(tensor.shape().size()));
        for (int d : tensor.shape()) put_u32(buf, static_cast<uint32_t>(d));
        const auto& data = tensor.data();
        const size_t bytes = data.size() * sizeof(float);
        const size_t off = buf.size();
        buf.resize(off + bytes);
        std::memcpy(buf.data() + off, data.data(), bytes);
    }
    put_str(buf, meta_to_json(meta).dump());
    put_u32(buf, crc32_of(buf));
    write_file(path, buf);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    const std::string buf = read_file(path);
    if (buf.size() < 12) throw CorruptFile("checkpoint too small");
    const std::string body = buf.substr(0, buf.size() - 4);
    Reader tail{buf, buf.size() - 4};
    if (tail.u32() != crc32_of(body)) throw CorruptFile("checkpoint CRC mismatch");

    Reader r{body};
    if (r.raw(4) != std::string(kMagic, 4)) throw CorruptFile("bad checkpoint magic");
    const uint32_t version = r.u32();
    if (version != kVersion)
        throw VersionMismatch("unsupported checkpoint version " + std::to_string(version));
    const ModelConfig cfg = ModelConfig::from_json(r.str());
    const std::string vocab_hash = r.str();

    Model model(cfg, 0);
    const uint32_t n_params = r.u32();
    if (n_params != model.named_parameters().size())
        throw CorruptFile("parameter count does not match config");
    for (uint32_t i = 0; i < n_params; ++i) {
        const std::string name = r.str();
        if (name != model.named_parameters()[i].first)
            throw CorruptFile("unexpected parameter name: " + name);
        if (r.u8() != 0) throw CorruptFile("unsupported dtype for " + name);
        const uint32_t ndim = r.u32();
        std::vector<int> shape(ndim);
        for (auto& d : shape) d = static_cast<int>(r.u32());
        auto& tensor = model.parameters()[i];
        if (shape != tensor.shape()) throw CorruptFile("shape mismatch for " + name);
        const size_t bytes = tensor.size() * sizeof(float);
        const std::string raw = r.raw(bytes);
        std::memcpy(tensor.data().data(), raw.data(), bytes);
    }
    const CheckpointMeta meta = meta_from_json(json::parse(r.str()));
    return {std::move(model), vocab_hash, meta};
}

Model load_checkpoint_checked(const std::string& path, const Vocab& vocab,
                              CheckpointMeta* meta_out) {
    LoadedCheckpoint loaded = load_checkpoint(path);
    if (loaded.vocab_hash_hex != vocab.content_hash())
        throw VocabHashMismatch("checkpoint was trained with a different vocabulary");
    if (meta_out) *meta_out = loaded.meta;
    return std::move(loaded.model);
}

}  // namespace cmta
