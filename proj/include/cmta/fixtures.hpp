#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmta/corpus.hpp"

namespace cmta {

// Synthetic corpus whose classes are separable by construction: each class
// carries disjoint marker tokens, so a marker-matching rule classifies it
// perfectly and overfit runs are meaningful.
struct SyntheticSpec {
    std::vector<std::string> languages = {"en", "es"};
    int records_per_class = 4;  // per (language, class)
    uint64_t seed = 0;
};

std::vector<TextRecord> gen_synthetic(const SyntheticSpec& spec);

// The marker tokens for a class, exposed for rule-based oracles.
const std::vector<std::string>& class_markers(MisinfoClass cls);

// Rule oracle: classify by which marker set appears in the text.
MisinfoClass marker_oracle(const std::string& text);

// 9,502 labeled records mirroring the collected-dataset table: per-language
// class counts are real, the texts are synthetic.
std::vector<TextRecord> table1_fixture();

}  // namespace cmta
