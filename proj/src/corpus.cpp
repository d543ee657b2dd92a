#include "kglink/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace kglink {

const RawTable* TableCorpus::find(const std::string& id) const {
    for (const auto& t : tables) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

void TableCorpus::rebuild_label_set() {
    std::set<std::string> labels;
    for (const auto& t : tables) {
        for (const auto& l : t.labels) {
            if (l) labels.insert(*l);
        }
    }
    label_set.assign(labels.begin(), labels.end());
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == '\t') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

void finish_table(RawTable& cur, std::vector<RawTable>& out, std::size_t lineno) {
    if (cur.id.empty()) return;
    if (cur.cells.empty()) {
        throw ParseError("table '" + cur.id + "' has no rows (before line " +
                         std::to_string(lineno) + ")");
    }
    cur.labels.assign(static_cast<std::size_t>(cur.ncols()), std::nullopt);
    out.push_back(std::move(cur));
    cur = RawTable{};
}

}  // namespace

std::vector<RawTable> load_tables(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tables file: " + path);

    std::vector<RawTable> out;
    RawTable cur;
    bool expect_header = false;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen_ids;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            finish_table(cur, out, lineno);
            expect_header = false;
            continue;
        }
        if (line.rfind("= ", 0) == 0) {
            finish_table(cur, out, lineno);
            std::string rest = trim(line.substr(2));
            expect_header = false;
            auto sp = rest.find(' ');
            if (sp != std::string::npos) {
                std::string flag = trim(rest.substr(sp + 1));
                rest = rest.substr(0, sp);
                if (flag == "header") {
                    expect_header = true;
                } else if (!flag.empty()) {
                    throw ParseError("line " + std::to_string(lineno) + ": unknown table flag '" +
                                     flag + "'");
                }
            }
            if (rest.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty table id");
            if (!seen_ids.insert(rest).second) {
                throw ParseError("line " + std::to_string(lineno) + ": duplicate table id '" + rest +
                                 "'");
            }
            cur.id = rest;
            continue;
        }
        if (cur.id.empty()) {
            throw ParseError("line " + std::to_string(lineno) + ": row outside of a table block");
        }
        auto fields = split_tabs(line);
        if (expect_header && cur.header.empty() && cur.cells.empty()) {
            cur.header = fields;
            continue;
        }
        if (!cur.cells.empty() && fields.size() != cur.cells[0].size()) {
            throw ParseError("line " + std::to_string(lineno) + ": table '" + cur.id +
                             "' is not rectangular");
        }
        if (!cur.header.empty() && fields.size() != cur.header.size()) {
            throw ParseError("line " + std::to_string(lineno) + ": table '" + cur.id +
                             "' row width differs from header");
        }
        cur.cells.push_back(std::move(fields));
    }
    finish_table(cur, out, lineno + 1);
    return out;
}

void load_labels(const std::string& path, std::vector<RawTable>& tables) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file: " + path);

    std::unordered_map<std::string, RawTable*> by_id;
    for (auto& t : tables) by_id.emplace(t.id, &t);

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3) {
            throw ParseError("labels line " + std::to_string(lineno) +
                             ": expected <table_id>\\t<column>\\t<label>");
        }
        auto it = by_id.find(fields[0]);
        if (it == by_id.end()) {
            throw ValidationError("labels line " + std::to_string(lineno) + ": unknown table id '" +
                                  fields[0] + "'");
        }
        int col = -1;
        try {
            col = std::stoi(fields[1]);
        } catch (const std::exception&) {
            throw ParseError("labels line " + std::to_string(lineno) + ": bad column index");
        }
        if (col < 0 || col >= it->second->ncols()) {
            throw ValidationError("labels line " + std::to_string(lineno) + ": column " +
                                  std::to_string(col) + " out of range for table '" + fields[0] +
                                  "'");
        }
        std::string label = trim(fields[2]);
        if (label.empty()) {
            throw ParseError("labels line " + std::to_string(lineno) + ": empty label");
        }
        it->second->labels[static_cast<std::size_t>(col)] = label;
    }
}

TableCorpus load_corpus(const std::string& tables_path, const std::string& labels_path) {
    TableCorpus corpus;
    corpus.tables = load_tables(tables_path);
    load_labels(labels_path, corpus.tables);
    corpus.rebuild_label_set();
    return corpus;
}

std::string tables_to_string(const std::vector<RawTable>& tables) {
    std::ostringstream out;
    for (const auto& t : tables) {
        out << "= " << t.id;
        if (!t.header.empty()) out << " header";
        out << "\n";
        if (!t.header.empty()) {
            for (std::size_t c = 0; c < t.header.size(); ++c) {
                if (c) out << "\t";
                out << t.header[c];
            }
            out << "\n";
        }
        for (const auto& row : t.cells) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out << "\t";
                out << row[c];
            }
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string labels_to_string(const std::vector<RawTable>& tables) {
    std::ostringstream out;
    for (const auto& t : tables) {
        for (std::size_t c = 0; c < t.labels.size(); ++c) {
            if (t.labels[c]) out << t.id << "\t" << c << "\t" << *t.labels[c] << "\n";
        }
    }
    return out.str();
}

}  // namespace kglink
