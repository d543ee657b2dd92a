#include "kglink/vocab.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "kglink/text.hpp"

namespace kglink {

namespace {
const char* kSpecialNames[] = {"<pad>", "<unk>", "<colstart>", "<seqend>", "<mask>"};
}

void Vocabulary::push(const std::string& token) {
    token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
    id_to_token_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<const RawTable*>& tables,
                             const KnowledgeGraph& kg) {
    std::map<std::string, std::uint64_t> counts;
    for (const RawTable* t : tables) {
        for (const auto& row : t->cells) {
            for (const auto& cell : row) {
                for (const auto& tok : tokenize(cell)) ++counts[tok];
            }
        }
    }
    for (const auto& id : kg.ids()) {
        for (const auto& tok : tokenize(kg.entity(id).label)) ++counts[tok];
        for (const auto& nb : kg.neighbors(id)) {
            for (const auto& tok : tokenize(nb.predicate)) ++counts[tok];
        }
    }

    std::vector<std::pair<std::string, std::uint64_t>> ordered(counts.begin(), counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    for (const char* s : kSpecialNames) v.push(s);
    for (const auto& [tok, count] : ordered) {
        if (!v.token_to_id_.count(tok)) v.push(tok);
    }
    return v;
}

int Vocabulary::encode_token(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(encode_token(t));
    return out;
}

const std::string& Vocabulary::token(int id) const {
    if (id < 0 || id >= size()) throw NotFoundError("token id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id)];
}

std::string Vocabulary::to_string() const {
    std::ostringstream out;
    for (const auto& t : id_to_token_) out << t << "\n";
    return out.str();
}

Vocabulary Vocabulary::from_string(const std::string& text) {
    Vocabulary v;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) v.push(line);
    }
    if (v.size() < kNumSpecials) throw ParseError("vocabulary dump is missing special tokens");
    for (int i = 0; i < kNumSpecials; ++i) {
        if (v.id_to_token_[static_cast<std::size_t>(i)] != kSpecialNames[i]) {
            throw ParseError("vocabulary dump has unexpected special token order");
        }
    }
    return v;
}

}  // namespace kglink
