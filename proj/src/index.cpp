#include "kglink/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kglink/text.hpp"

namespace kglink {

using nlohmann::json;

InvertedIndex InvertedIndex::build(const KnowledgeGraph& kg, double k1, double b,
                                   std::vector<std::string>* warnings) {
    if (k1 < 0.0) throw ValidationError("k1 must be >= 0");
    if (b < 0.0 || b > 1.0) throw ValidationError("b must be in [0, 1]");
    if (kg.entity_count() == 0) throw ValidationError("cannot index an empty knowledge graph");

    InvertedIndex ix;
    ix.k1_ = k1;
    ix.b_ = b;

    std::uint64_t total_len = 0;
    for (const auto& id : kg.ids()) {
        const Entity& e = kg.entity(id);
        std::vector<std::string> tokens = tokenize(e.label);
        for (const auto& a : e.aliases) {
            auto ts = tokenize(a);
            tokens.insert(tokens.end(), ts.begin(), ts.end());
        }
        if (tokens.empty()) {
            if (warnings) warnings->push_back("entity " + id + " has no indexable tokens; skipped");
            continue;
        }
        auto doc = static_cast<std::uint32_t>(ix.doc_ids_.size());
        ix.doc_ids_.push_back(id);
        ix.doc_index_.emplace(id, doc);
        ix.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_len += tokens.size();

        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [token, count] : tf) ix.postings_[token].push_back({doc, count});
    }
    if (ix.doc_ids_.empty()) throw ValidationError("no indexable entities in knowledge graph");
    ix.avgwl_ = static_cast<double>(total_len) / static_cast<double>(ix.doc_ids_.size());
    return ix;
}

double InvertedIndex::idf(const std::string& word) const {
    auto it = postings_.find(word);
    double n = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
    double N = static_cast<double>(doc_ids_.size());
    return std::log((N - n + 0.5) / (n + 0.5) + 1.0);
}

double InvertedIndex::bm25_score(const std::vector<std::string>& query,
                                 const std::string& entity_id) const {
    auto it = doc_index_.find(entity_id);
    if (it == doc_index_.end()) throw NotFoundError("entity not indexed: " + entity_id);
    std::uint32_t doc = it->second;

    double score = 0.0;
    for (const auto& w : query) {
        auto pit = postings_.find(w);
        if (pit == postings_.end()) continue;
        const auto& plist = pit->second;
        auto found = std::lower_bound(plist.begin(), plist.end(), doc,
                                      [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (found == plist.end() || found->doc != doc) continue;
        double tf = found->tf;
        score += idf(w) * tf * (k1_ + 1.0) / (tf + doc_norm(doc));
    }
    return score;
}

std::vector<SearchHit> InvertedIndex::search(const std::string& mention, std::size_t top_n) const {
    if (top_n < 1) throw ValidationError("top_n must be >= 1");
    std::vector<std::string> query = tokenize(mention);

    std::vector<double> scores(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& w : query) {
        auto pit = postings_.find(w);
        if (pit == postings_.end()) continue;
        double w_idf = idf(w);
        for (const auto& p : pit->second) {
            if (scores[p.doc] == 0.0) touched.push_back(p.doc);
            double tf = p.tf;
            scores[p.doc] += w_idf * tf * (k1_ + 1.0) / (tf + doc_norm(p.doc));
        }
    }

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    std::vector<SearchHit> hits;
    hits.reserve(touched.size());
    for (auto doc : touched) {
        if (scores[doc] > 0.0) hits.push_back({doc_ids_[doc], scores[doc]});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entity_id < b.entity_id;
    });
    if (hits.size() > top_n) hits.resize(top_n);
    return hits;
}

namespace {
constexpr int kIndexFormatVersion = 1;
}

void InvertedIndex::save(const std::string& path, std::uint64_t kg_hash) const {
    std::ostringstream out;
    json header = {{"format_version", kIndexFormatVersion},
                   {"kg_hash", kg_hash},
                   {"k1", k1_},
                   {"b", b_},
                   {"docs", doc_ids_.size()},
                   {"avgwl", avgwl_}};
    out << header.dump() << "\n";
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        out << "doc\t" << doc_ids_[i] << "\t" << doc_lengths_[i] << "\n";
    }
    for (const auto& [token, plist] : postings_) {
        out << "post\t" << token;
        for (const auto& p : plist) out << "\t" << p.doc << ":" << p.tf;
        out << "\n";
    }
    write_file(path, out.str());
}

std::optional<InvertedIndex> InvertedIndex::load(const std::string& path,
                                                 std::uint64_t expected_kg_hash) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception&) {
        return std::nullopt;
    }
    if (!header.is_object() || header.value("format_version", -1) != kIndexFormatVersion) {
        return std::nullopt;
    }
    if (header.value("kg_hash", std::uint64_t{0}) != expected_kg_hash) return std::nullopt;

    InvertedIndex ix;
    ix.k1_ = header.value("k1", 1.2);
    ix.b_ = header.value("b", 0.75);
    ix.avgwl_ = header.value("avgwl", 0.0);

    std::uint64_t total_len = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string kind;
        std::getline(ss, kind, '\t');
        if (kind == "doc") {
            std::string id, len;
            std::getline(ss, id, '\t');
            std::getline(ss, len, '\t');
            ix.doc_index_.emplace(id, static_cast<std::uint32_t>(ix.doc_ids_.size()));
            ix.doc_ids_.push_back(id);
            ix.doc_lengths_.push_back(static_cast<std::uint32_t>(std::stoul(len)));
            total_len += ix.doc_lengths_.back();
        } else if (kind == "post") {
            std::string token;
            std::getline(ss, token, '\t');
            auto& plist = ix.postings_[token];
            std::string pair;
            while (std::getline(ss, pair, '\t')) {
                auto colon = pair.find(':');
                if (colon == std::string::npos) return std::nullopt;
                plist.push_back({static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon))),
                                 static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)))});
            }
        } else {
            return std::nullopt;
        }
    }
    if (ix.doc_ids_.empty()) return std::nullopt;
    return ix;
}

}  // namespace kglink
