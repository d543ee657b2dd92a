#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "kglink/corpus.hpp"
#include "kglink/kg.hpp"

namespace kglink {

// Word-level vocabulary: special tokens, then corpus/KG tokens ordered by
// frequency descending (ties lexicographic). Out-of-vocabulary tokens map
// to UNK at encode time.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kColStart = 2;  // per-column start marker
    static constexpr int kSeqEnd = 3;
    static constexpr int kMask = 4;
    static constexpr int kNumSpecials = 5;

    // Tokens from the given tables' cells plus all KG entity labels and
    // edge predicates.
    static Vocabulary build(const std::vector<const RawTable*>& tables, const KnowledgeGraph& kg);

    int encode_token(const std::string& token) const;
    std::vector<int> encode(const std::vector<std::string>& tokens) const;
    const std::string& token(int id) const;

    int size() const { return static_cast<int>(id_to_token_.size()); }

    std::string to_string() const;
    static Vocabulary from_string(const std::string& text);

private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;

    void push(const std::string& token);
};

}  // namespace kglink
