#pragma once

#include <array>
#include <string>

#include "cmta/model.hpp"
#include "cmta/preprocess.hpp"
#include "cmta/tokenizer.hpp"

namespace cmta {

struct Prediction {
    MisinfoClass cls = MisinfoClass::False_;
    std::array<double, 3> probs{};
};

// clean -> encode -> encoder -> conv head -> classify -> argmax. Eval mode,
// deterministic.
Prediction predict(const std::string& text, const std::string& language, const Vocab& vocab,
                   const Model& model, const StopwordTable& stopwords);

// Same, for text that is already cleaned.
Prediction predict_clean(const std::string& clean_text, const Vocab& vocab,
                         const Model& model);

}  // namespace cmta
