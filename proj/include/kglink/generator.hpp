#pragma once

#include <string>

#include "kglink/corpus.hpp"

namespace kglink {

struct GenKnobs {
    std::uint64_t seed = 0;
    int n_tables = 200;
    int rows_min = 5;
    int rows_max = 30;
    // Low-quality rows prepended to every table (text cells carry garbage
    // with no KG match); used by the row-filter comparison.
    int noise_rows = 0;
    int instances_per_family = 40;
    // Probability that a generated row is a KG-linked entity pair rather
    // than a random surface pairing.
    double linked_row_prob = 0.75;
};

struct GeneratedCorpus {
    std::string kg_jsonl;
    TableCorpus corpus;
};

// Deterministic synthetic benchmark: a small knowledge graph plus labeled
// tables over 8 column classes. Two pairs of classes are textual twins
// (identical mention distributions) that only the graph structure can
// separate; numeric and unlinkable-code classes exercise the no-KG paths.
GeneratedCorpus gen_micro_corpus(const GenKnobs& knobs);

// Writes kg.jsonl, tables.tsv and labels.tsv under dir (created if needed).
void write_corpus(const GeneratedCorpus& gen, const std::string& dir);

}  // namespace kglink
