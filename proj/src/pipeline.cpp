#include "cmta/pipeline.hpp"

namespace cmta {

Prediction predict_clean(const std::string& clean_text, const Vocab& vocab,
                         const Model& model) {
    const TokenSequence seq = encode(clean_text, vocab, model.config().max_len);
    std::mt19937_64 rng(0);  // unused in eval mode
    nn::Tensor probs = model.forward(seq, nn::DropoutMode::Eval, rng);
    Prediction pred;
    int best = 0;
    for (int i = 0; i < 3; ++i) {
        pred.probs[static_cast<size_t>(i)] = static_cast<double>(probs.data()[static_cast<size_t>(i)]);
        if (probs.data()[static_cast<size_t>(i)] > probs.data()[static_cast<size_t>(best)]) best = i;
    }
    pred.cls = static_cast<MisinfoClass>(best);
    return pred;
}

Prediction predict(const std::string& text, const std::string& language, const Vocab& vocab,
                   const Model& model, const StopwordTable& stopwords) {
    TextRecord rec;
    rec.raw_text = text;
    rec.language = language;
    const CleanText cleaned = clean(rec, stopwords);
    return predict_clean(cleaned.text, vocab, model);
}

}  // namespace cmta
