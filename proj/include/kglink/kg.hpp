#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kglink/common.hpp"

namespace kglink {

struct Entity {
    std::string id;
    std::string label;
    std::vector<std::string> aliases;
};

// One adjacency entry; traversal is undirected, so an edge A -p-> B yields
// (p, B) under A and (p, A) under B.
struct Neighbor {
    std::string predicate;
    std::string target;

    friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

// Immutable after load; safe for concurrent reads.
class KnowledgeGraph {
public:
    bool contains(const std::string& id) const { return entities_.count(id) != 0; }

    const Entity& entity(const std::string& id) const;

    // Sorted by predicate then target id; includes both edge directions.
    const std::vector<Neighbor>& neighbors(const std::string& id) const;

    // Union of neighbor ids over the input set. Inputs themselves are not
    // implicitly included.
    std::set<std::string> one_hop_set(const std::set<std::string>& ids) const;

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    // Entity ids in ascending order; the canonical iteration order for
    // anything whose output must be reproducible.
    const std::vector<std::string>& ids() const { return ids_; }

private:
    friend KnowledgeGraph load_kg(const std::string& path, std::vector<std::string>* warnings);

    std::unordered_map<std::string, Entity> entities_;
    std::unordered_map<std::string, std::vector<Neighbor>> adjacency_;
    std::vector<std::string> ids_;
    std::size_t edge_count_ = 0;
};

// Loads a line-delimited KG file (one JSON entity record per line, see
// README for the schema). Self-loops are dropped with a warning. Throws
// ParseError with the offending line number on malformed records,
// ValidationError on duplicate ids or dangling edge targets.
KnowledgeGraph load_kg(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace kglink
