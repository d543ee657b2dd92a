#include "kglink/kg.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace kglink {

using nlohmann::json;

const Entity& KnowledgeGraph::entity(const std::string& id) const {
    auto it = entities_.find(id);
    if (it == entities_.end()) throw NotFoundError("unknown entity id: " + id);
    return it->second;
}

const std::vector<Neighbor>& KnowledgeGraph::neighbors(const std::string& id) const {
    if (!contains(id)) throw NotFoundError("unknown entity id: " + id);
    static const std::vector<Neighbor> kEmpty;
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? kEmpty : it->second;
}

std::set<std::string> KnowledgeGraph::one_hop_set(const std::set<std::string>& ids) const {
    std::set<std::string> out;
    for (const auto& id : ids) {
        for (const auto& nb : neighbors(id)) out.insert(nb.target);
    }
    return out;
}

namespace {

struct RawEdge {
    std::string source;
    std::string predicate;
    std::string target;
};

}  // namespace

KnowledgeGraph load_kg(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open KG file: " + path);

    KnowledgeGraph kg;
    std::vector<RawEdge> edges;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("KG line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("label") ||
            !rec["id"].is_string() || !rec["label"].is_string()) {
            throw ParseError("KG line " + std::to_string(lineno) +
                             ": record must be an object with string 'id' and 'label'");
        }
        Entity e;
        e.id = rec["id"].get<std::string>();
        e.label = rec["label"].get<std::string>();
        if (e.id.empty() || e.label.empty()) {
            throw ParseError("KG line " + std::to_string(lineno) + ": empty id or label");
        }
        if (rec.contains("aliases")) {
            if (!rec["aliases"].is_array()) {
                throw ParseError("KG line " + std::to_string(lineno) + ": 'aliases' must be an array");
            }
            for (const auto& a : rec["aliases"]) {
                if (!a.is_string()) {
                    throw ParseError("KG line " + std::to_string(lineno) + ": alias must be a string");
                }
                e.aliases.push_back(a.get<std::string>());
            }
        }
        if (rec.contains("edges")) {
            if (!rec["edges"].is_array()) {
                throw ParseError("KG line " + std::to_string(lineno) + ": 'edges' must be an array");
            }
            for (const auto& ed : rec["edges"]) {
                if (!ed.is_object() || !ed.contains("predicate") || !ed.contains("target") ||
                    !ed["predicate"].is_string() || !ed["target"].is_string()) {
                    throw ParseError("KG line " + std::to_string(lineno) +
                                     ": edge must have string 'predicate' and 'target'");
                }
                RawEdge re{e.id, ed["predicate"].get<std::string>(), ed["target"].get<std::string>()};
                if (re.predicate.empty()) {
                    throw ParseError("KG line " + std::to_string(lineno) + ": empty predicate");
                }
                edges.push_back(std::move(re));
            }
        }
        if (kg.entities_.count(e.id)) {
            throw ValidationError("duplicate entity id: " + e.id);
        }
        kg.ids_.push_back(e.id);
        kg.entities_.emplace(e.id, std::move(e));
    }

    // Resolve edges once all entities are known; this makes loading
    // order-independent.
    std::vector<std::string> dangling;
    for (const auto& ed : edges) {
        if (!kg.entities_.count(ed.target)) dangling.push_back(ed.source + " -> " + ed.target);
    }
    if (!dangling.empty()) {
        std::sort(dangling.begin(), dangling.end());
        std::string msg = "dangling edge targets:";
        for (const auto& d : dangling) msg += " [" + d + "]";
        throw ValidationError(msg);
    }

    for (const auto& ed : edges) {
        if (ed.source == ed.target) {
            if (warnings) warnings->push_back("dropped self-loop on entity " + ed.source);
            continue;
        }
        kg.adjacency_[ed.source].push_back({ed.predicate, ed.target});
        kg.adjacency_[ed.target].push_back({ed.predicate, ed.source});
    }

    std::size_t entries = 0;
    for (auto& [id, nbs] : kg.adjacency_) {
        std::sort(nbs.begin(), nbs.end());
        nbs.erase(std::unique(nbs.begin(), nbs.end()), nbs.end());
        entries += nbs.size();
    }
    kg.edge_count_ = entries / 2;  // undirected count after dedup
    std::sort(kg.ids_.begin(), kg.ids_.end());
    return kg;
}

}  // namespace kglink
