#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kglink/kg.hpp"

namespace kglink {

struct SearchHit {
    std::string entity_id;
    double score;
};

// Inverted index over entity documents (label + aliases) with BM25 scoring.
// Immutable after build; concurrent searches are safe.
class InvertedIndex {
public:
    // One document per entity, in ascending id order. Entities whose
    // label+aliases tokenize to nothing are skipped with a warning: they
    // can never match a query.
    static InvertedIndex build(const KnowledgeGraph& kg, double k1 = 1.2, double b = 0.75,
                               std::vector<std::string>* warnings = nullptr);

    // ln((N - n(w) + 0.5) / (n(w) + 0.5) + 1); defined (and positive) for
    // words absent from the corpus.
    double idf(const std::string& word) const;

    // Sum over query tokens of idf * tf * (k1+1) / (tf + k1*(1-b+b*len/avgwl)).
    // Tokens absent from the document contribute 0.
    double bm25_score(const std::vector<std::string>& query, const std::string& entity_id) const;

    // Entities with score > 0, sorted by score descending, ties broken by
    // entity id ascending; at most top_n results.
    std::vector<SearchHit> search(const std::string& mention, std::size_t top_n) const;

    bool has_document(const std::string& entity_id) const { return doc_index_.count(entity_id) != 0; }
    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avgwl_; }
    std::size_t vocabulary_size() const { return postings_.size(); }
    double k1() const { return k1_; }
    double b() const { return b_; }

    // Cache persistence. The artifact embeds the source KG fingerprint;
    // load() returns nullopt when the fingerprint (or format version)
    // does not match.
    void save(const std::string& path, std::uint64_t kg_hash) const;
    static std::optional<InvertedIndex> load(const std::string& path, std::uint64_t expected_kg_hash);

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    double doc_norm(std::uint32_t doc) const {
        return k1_ * (1.0 - b_ + b_ * static_cast<double>(doc_lengths_[doc]) / avgwl_);
    }

    std::map<std::string, std::vector<Posting>> postings_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::uint32_t> doc_index_;
    double avgwl_ = 0.0;
    double k1_ = 1.2;
    double b_ = 0.75;
};

}  // namespace kglink
