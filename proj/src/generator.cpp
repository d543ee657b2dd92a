#include "kglink/generator.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "json.hpp"

namespace kglink {

using nlohmann::json;

namespace {

const std::array<const char*, 20> kFirstA = {"Aldo", "Bryn", "Cato", "Dara", "Edan",
                                             "Fern", "Gale", "Hollis", "Iver", "Juna",
                                             "Kiro", "Lena", "Milo", "Nera", "Orin",
                                             "Pavo", "Quil", "Rosa", "Sten", "Tova"};
const std::array<const char*, 20> kLastA = {"Brennan", "Calder", "Draven", "Ellwood", "Farrow",
                                            "Garnet", "Halden", "Ingram", "Jarvis", "Keaton",
                                            "Lowell", "Marsh", "Norwood", "Ostler", "Pruitt",
                                            "Quimby", "Rutland", "Severin", "Thorne", "Underhill"};
const std::array<const char*, 10> kMidA = {"Ash", "Bell", "Cole", "Dunn", "Elm",
                                           "Finch", "Gray", "Hart", "Ives", "Jett"};

const std::array<const char*, 20> kFirstB = {"Ulric", "Vesper", "Wade", "Xeno", "York",
                                             "Zane", "Amos", "Blythe", "Corin", "Dexter",
                                             "Eamon", "Flint", "Gideon", "Haywood", "Ike",
                                             "Jubal", "Kane", "Lorne", "Maddox", "Niles"};
const std::array<const char*, 20> kLastB = {"Atwater", "Birch", "Coble", "Dalton", "Eastman",
                                            "Fenwick", "Granger", "Holt", "Irwin", "Jessup",
                                            "Kirby", "Landry", "Mercer", "Nash", "Oakes",
                                            "Pike", "Quarles", "Redding", "Slater", "Tate"};
const std::array<const char*, 10> kMidB = {"Orr", "Penn", "Rhys", "Sloan", "Thane",
                                           "Uri", "Vose", "Webb", "Yule", "Zeke"};

const std::array<const char*, 15> kMineral = {"Argent", "Boric", "Cerulean", "Dolomite", "Ersatz",
                                              "Ferric", "Gypsum", "Halite", "Iodic", "Jasper",
                                              "Kaolin", "Lithic", "Malachite", "Nitric", "Ochre"};
const std::array<const char*, 10> kSalt = {"Oxide", "Chloride", "Sulfate", "Nitrate", "Carbonate",
                                           "Silicate", "Phosphate", "Bromide", "Acetate",
                                           "Fluoride"};

const std::array<const char*, 18> kCodePrefix = {"QZ", "XV", "KJ", "ZR", "VQ", "JX",
                                                 "QK", "ZV", "XW", "VJ", "KQ", "ZX",
                                                 "WQ", "JZ", "XK", "VZ", "QJ", "WZ"};
const std::array<const char*, 5> kNoisePrefix = {"ZZ", "QQ", "XX", "YY", "WW"};

// Deterministic distinct names from a first/mid/last pool. Every third
// index gets a middle token so mention widths vary (1 name = 2 or 3
// tokens); all stay capitalized multi-token, which keeps instances out of
// the candidate-type space.
template <std::size_t NF, std::size_t NL, std::size_t NM>
std::vector<std::string> make_names(const std::array<const char*, NF>& first,
                                    const std::array<const char*, NL>& last,
                                    const std::array<const char*, NM>& mid, int count) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) {
        std::size_t pair = (static_cast<std::size_t>(i) * 11 + 5) % (NF * NL);
        std::string name = first[pair / NL];
        if (i % 3 == 0) {
            name += " ";
            name += mid[static_cast<std::size_t>(i / 3) % NM];
        }
        name += " ";
        name += last[pair % NL];
        out.push_back(std::move(name));
    }
    return out;
}

struct KgRecord {
    std::string id;
    std::string label;
    std::vector<std::string> aliases;
    std::vector<std::pair<std::string, std::string>> edges;  // predicate, target
};

std::string two_digit(int v) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", v);
    return buf;
}

std::string pad3(int v) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%03d", v);
    return buf;
}

enum class ColumnClass { Album, City, Artist, Team, Compound, Year, Rating, Code };

const char* class_label(ColumnClass c) {
    switch (c) {
        case ColumnClass::Album: return "album";
        case ColumnClass::City: return "city";
        case ColumnClass::Artist: return "artist";
        case ColumnClass::Team: return "team";
        case ColumnClass::Compound: return "compound";
        case ColumnClass::Year: return "year";
        case ColumnClass::Rating: return "rating";
        case ColumnClass::Code: return "code";
    }
    return "";
}

}  // namespace

GeneratedCorpus gen_micro_corpus(const GenKnobs& knobs) {
    if (knobs.n_tables < 1 || knobs.rows_min < 1 || knobs.rows_max < knobs.rows_min) {
        throw ValidationError("bad generator knobs");
    }
    const int nf = knobs.instances_per_family;
    Rng rng(knobs.seed);

    auto names_a = make_names(kFirstA, kLastA, kMidA, nf);  // shared by album/city twins
    auto names_b = make_names(kFirstB, kLastB, kMidB, nf);  // shared by artist/team twins

    std::vector<KgRecord> records;
    auto add = [&records](KgRecord r) { records.push_back(std::move(r)); };

    // Type entities. Their labels carry the dataset label words so every
    // ground-truth label is representable in the vocabulary.
    add({"ty_album", "studio album", {}, {}});
    add({"ty_city", "historic city", {}, {}});
    add({"ty_artist", "recording artist", {"studio performer"}, {}});
    add({"ty_team", "football team", {}, {}});
    add({"ty_compound", "chemical compound", {}, {}});

    // Vocabulary anchors for the classes that never touch the KG.
    add({"r_year", "year almanac", {}, {}});
    add({"r_rating", "rating scale", {}, {}});
    add({"r_code", "code registry", {}, {}});

    // Person and date decoys: filtered out of type candidacy but present in
    // one-hop neighborhoods and the BM25 index.
    std::vector<std::string> person_ids;
    for (int k = 0; k < 12; ++k) {
        std::string id = "p" + pad3(k);
        std::string label = std::string(kFirstA[(k * 5 + 2) % 20]) + " " + kLastB[(k * 3 + 1) % 20];
        person_ids.push_back(id);
        add({id, label, {}, {}});
    }
    std::vector<std::string> date_ids;
    for (int k = 0; k < 8; ++k) {
        std::string id = "d" + pad3(k);
        std::string label =
            "19" + two_digit(10 + k * 9 % 80) + "-" + two_digit(1 + k % 12) + "-" +
            two_digit(3 + k * 7 % 27);
        date_ids.push_back(id);
        add({id, label, {}, {}});
    }

    // Edge-free distractors: extra BM25 mass on shared name tokens.
    for (int k = 0; k < 10; ++k) {
        std::string label = k % 2 == 0 ? kLastA[(k * 7) % 20] : kLastB[(k * 9 + 4) % 20];
        add({"r_tok" + pad3(k), label, {}, {}});
    }

    // Instance families. Albums and cities share surface names; artists and
    // teams share surface names. Only the relational edges differ:
    //   artist j  -- created work --> albums j, j+1, j+2
    //   team j    -- based in     --> cities j+off, j+off+1, j+off+2
    // so the twin that survives overlap pruning identifies the class.
    const int off = nf / 2;
    for (int i = 0; i < nf; ++i) {
        KgRecord x{"x" + pad3(i), names_a[static_cast<std::size_t>(i)], {}, {}};
        x.edges.emplace_back("instance of", "ty_album");
        if (i % 4 == 0) x.edges.emplace_back("managed by", person_ids[static_cast<std::size_t>(i / 4 % 12)]);
        KgRecord y{"y" + pad3(i), names_a[static_cast<std::size_t>(i)], {}, {}};
        y.edges.emplace_back("instance of", "ty_city");
        if (i % 5 == 0) y.edges.emplace_back("founded on", date_ids[static_cast<std::size_t>(i / 5 % 8)]);
        if (i % 7 == 0) {
            std::string alias = "The " + std::string(kLastA[(i * 11 + 5) % (20 * 20) % 20]);
            x.aliases.push_back(alias);
            y.aliases.push_back(alias);
        }
        add(std::move(x));
        add(std::move(y));
    }
    for (int j = 0; j < nf; ++j) {
        KgRecord u{"u" + pad3(j), names_b[static_cast<std::size_t>(j)], {}, {}};
        u.edges.emplace_back("instance of", "ty_artist");
        for (int t = 0; t < 3; ++t) u.edges.emplace_back("created work", "x" + pad3((j + t) % nf));
        KgRecord w{"w" + pad3(j), names_b[static_cast<std::size_t>(j)], {}, {}};
        w.edges.emplace_back("instance of", "ty_team");
        for (int t = 0; t < 3; ++t) {
            w.edges.emplace_back("based in", "y" + pad3((j + off + t) % nf));
        }
        if (j % 7 == 3) {
            std::string alias = "The " + std::string(kLastB[(j * 11 + 5) % (20 * 20) % 20]);
            u.aliases.push_back(alias);
            w.aliases.push_back(alias);
        }
        add(std::move(u));
        add(std::move(w));
    }
    for (int a = 0; a < nf; ++a) {
        std::string label = std::string(kMineral[static_cast<std::size_t>(a) % 15]) + " " +
                            kSalt[static_cast<std::size_t>(a * 3 + 1) % 10];
        KgRecord c{"c" + pad3(a), label, {}, {}};
        c.edges.emplace_back("instance of", "ty_compound");
        c.edges.emplace_back("reacts with", "c" + pad3((a + 1) % nf));
        c.edges.emplace_back("reacts with", "c" + pad3((a + 7) % nf));
        add(std::move(c));
    }

    std::ostringstream kg_out;
    for (const auto& r : records) {
        json j;
        j["id"] = r.id;
        j["label"] = r.label;
        if (!r.aliases.empty()) j["aliases"] = r.aliases;
        if (!r.edges.empty()) {
            auto edges = json::array();
            for (const auto& [p, t] : r.edges) edges.push_back({{"predicate", p}, {"target", t}});
            j["edges"] = edges;
        }
        kg_out << j.dump() << "\n";
    }

    // --- Tables ---
    auto year_cell = [&rng]() { return std::to_string(1900 + static_cast<int>(rng.uniform(121))); };
    auto rating_cell = [&rng]() {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.1f", static_cast<double>(rng.uniform(101)) / 10.0);
        return std::string(buf);
    };
    auto code_cell = [&rng]() {
        return std::string(kCodePrefix[static_cast<std::size_t>(rng.uniform(kCodePrefix.size()))]) +
               "-" + std::to_string(100 + static_cast<int>(rng.uniform(9900)));
    };
    auto noise_cell = [&rng]() {
        return std::string(
                   kNoisePrefix[static_cast<std::size_t>(rng.uniform(kNoisePrefix.size()))]) +
               "-" + std::to_string(10000 + static_cast<int>(rng.uniform(90000)));
    };
    // Twin entities share their alias, so alias mentions stay ambiguous too.
    std::vector<std::string> alias_a(static_cast<std::size_t>(nf)), alias_b(static_cast<std::size_t>(nf));
    for (int i = 0; i < nf; ++i) {
        if (i % 7 == 0) alias_a[static_cast<std::size_t>(i)] = "The " + std::string(kLastA[(i * 11 + 5) % 400 % 20]);
        if (i % 7 == 3) alias_b[static_cast<std::size_t>(i)] = "The " + std::string(kLastB[(i * 11 + 5) % 400 % 20]);
    }
    auto mention_for = [&rng](int idx, const std::vector<std::string>& names,
                              const std::vector<std::string>& aliases) {
        const std::string& alias = aliases[static_cast<std::size_t>(idx)];
        if (!alias.empty() && rng.chance(0.1)) return alias;
        return names[static_cast<std::size_t>(idx)];
    };

    TableCorpus corpus;
    for (int ti = 0; ti < knobs.n_tables; ++ti) {
        // 20-slot template cycle: 6 album/artist, 6 city/team, 5 compound,
        // 3 with no linkable column at all.
        int slot = ti % 20;
        int templ = slot < 6 ? 0 : slot < 12 ? 1 : slot < 17 ? 2 : 3;

        std::vector<ColumnClass> classes;
        if (templ == 0) {
            classes = {ColumnClass::Album, ColumnClass::Artist};
        } else if (templ == 1) {
            classes = {ColumnClass::City, ColumnClass::Team};
        } else if (templ == 2) {
            classes = {ColumnClass::Compound, ColumnClass::Compound};
        } else {
            classes = rng.chance(0.5)
                          ? std::vector<ColumnClass>{ColumnClass::Year, ColumnClass::Code}
                          : std::vector<ColumnClass>{ColumnClass::Rating, ColumnClass::Code,
                                                     ColumnClass::Year};
        }
        if (templ != 3) {
            if (rng.chance(0.6)) {
                classes.push_back(rng.chance(0.5) ? ColumnClass::Year : ColumnClass::Rating);
            }
            if (rng.chance(0.35)) classes.push_back(ColumnClass::Code);
        }
        rng.shuffle(classes);

        int nrows = rng.uniform_int(knobs.rows_min, knobs.rows_max);
        RawTable table;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "t%04d", ti);
        table.id = idbuf;

        // The city/team link pattern is shifted by `off` in index space;
        // linked rows must follow the shift of their template.
        const int pair_delta = templ == 1 ? off : 0;
        for (int r = 0; r < knobs.noise_rows + nrows; ++r) {
            bool noise = r < knobs.noise_rows;
            // Pick the linked entity pair once per row; twin columns in the
            // same row then share the pairing.
            bool linked = rng.chance(knobs.linked_row_prob);
            int j = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nf)));
            int i = linked ? (j + pair_delta + static_cast<int>(rng.uniform(3))) % nf
                           : static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nf)));
            int ca = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nf)));
            int cb = linked ? (rng.chance(0.5) ? (ca + 1) % nf : (ca + 7) % nf)
                            : static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nf)));
            bool first_compound = true;

            std::vector<std::string> row;
            for (ColumnClass cls : classes) {
                std::string cell;
                switch (cls) {
                    case ColumnClass::Album:
                    case ColumnClass::City:
                        cell = noise ? noise_cell() : mention_for(i, names_a, alias_a);
                        break;
                    case ColumnClass::Artist:
                    case ColumnClass::Team:
                        cell = noise ? noise_cell() : mention_for(j, names_b, alias_b);
                        break;
                    case ColumnClass::Compound: {
                        int idx = first_compound ? ca : cb;
                        first_compound = false;
                        cell = noise ? noise_cell()
                                     : std::string(kMineral[static_cast<std::size_t>(idx) % 15]) +
                                           " " + kSalt[static_cast<std::size_t>(idx * 3 + 1) % 10];
                        break;
                    }
                    case ColumnClass::Year:
                        cell = year_cell();
                        break;
                    case ColumnClass::Rating:
                        cell = rating_cell();
                        break;
                    case ColumnClass::Code:
                        cell = code_cell();
                        break;
                }
                row.push_back(std::move(cell));
            }
            table.cells.push_back(std::move(row));
        }
        table.labels.clear();
        for (ColumnClass cls : classes) table.labels.emplace_back(class_label(cls));
        corpus.tables.push_back(std::move(table));
    }
    corpus.rebuild_label_set();

    GeneratedCorpus out;
    out.kg_jsonl = kg_out.str();
    out.corpus = std::move(corpus);
    return out;
}

void write_corpus(const GeneratedCorpus& gen, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/kg.jsonl", gen.kg_jsonl);
    write_file(dir + "/tables.tsv", tables_to_string(gen.corpus.tables));
    write_file(dir + "/labels.tsv", labels_to_string(gen.corpus.tables));
}

}  // namespace kglink
