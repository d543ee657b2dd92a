#include "kglink/linking.hpp"

#include <array>
#include <cctype>

#include "kglink/common.hpp"

namespace kglink {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s) {
        if (!std::isdigit(c)) return false;
    }
    return true;
}

// Integer / decimal / signed / percent / thousands-separated.
bool is_numeric_mention(const std::string& s) {
    std::size_t i = 0;
    std::size_t n = s.size();
    if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
    if (i >= n) return false;

    // Integer part: plain digits or comma-grouped (1,234,567).
    std::size_t digits_start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t plain_digits = i - digits_start;
    if (plain_digits == 0) {
        // Allow leading-dot decimals like ".5"? Keep strict: require digits.
        return false;
    }
    if (i < n && s[i] == ',') {
        // Thousands grouping: first group 1-3 digits, then groups of 3.
        if (plain_digits > 3) return false;
        while (i < n && s[i] == ',') {
            ++i;
            std::size_t g = 0;
            while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
                ++i;
                ++g;
            }
            if (g != 3) return false;
        }
    }
    if (i < n && s[i] == '.') {
        ++i;
        std::size_t f = 0;
        while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++f;
        }
        if (f == 0) return false;
    }
    if (i < n && s[i] == '%') ++i;
    return i == n;
}

bool in_range(const std::string& s, int lo, int hi) {
    if (!all_digits(s) || s.size() > 4) return false;
    int v = std::stoi(s);
    return v >= lo && v <= hi;
}

bool is_month_name(const std::string& lower, int* month_out = nullptr) {
    static const std::array<const char*, 12> kMonths = {"january", "february", "march",
                                                        "april",   "may",      "june",
                                                        "july",    "august",   "september",
                                                        "october", "november", "december"};
    for (std::size_t m = 0; m < kMonths.size(); ++m) {
        std::string full = kMonths[m];
        std::string abbr = full.substr(0, 3);
        if (lower == full || lower == abbr) {
            if (month_out) *month_out = static_cast<int>(m + 1);
            return true;
        }
    }
    return false;
}

std::string lower_copy(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Splits on spaces and commas, keeping digit/word runs.
std::vector<std::string> date_pieces(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_date_mention(const std::string& s) {
    // ISO: yyyy-mm-dd
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        std::string y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
        if (all_digits(y) && in_range(m, 1, 12) && in_range(d, 1, 31)) return true;
    }
    // Numeric d/m/y or m/d/y with '/' or '-' separators.
    for (char sep : {'/', '-'}) {
        auto p1 = s.find(sep);
        if (p1 == std::string::npos) continue;
        auto p2 = s.find(sep, p1 + 1);
        if (p2 == std::string::npos || s.find(sep, p2 + 1) != std::string::npos) continue;
        std::string a = s.substr(0, p1), b = s.substr(p1 + 1, p2 - p1 - 1), c = s.substr(p2 + 1);
        if (!all_digits(a) || !all_digits(b) || !all_digits(c)) continue;
        bool year_ok = c.size() == 2 || c.size() == 4;
        bool dm_ok = (in_range(a, 1, 31) && in_range(b, 1, 12)) ||
                     (in_range(a, 1, 12) && in_range(b, 1, 31));
        if (year_ok && dm_ok) return true;
    }
    // Month-name forms.
    auto pieces = date_pieces(lower_copy(s));
    if (pieces.size() >= 2 && pieces.size() <= 3) {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (!is_month_name(pieces[i])) continue;
            bool others_ok = true;
            for (std::size_t j = 0; j < pieces.size(); ++j) {
                if (j == i) continue;
                // day or year component
                if (!(in_range(pieces[j], 1, 31) || (all_digits(pieces[j]) && pieces[j].size() == 4))) {
                    others_ok = false;
                }
            }
            if (others_ok) return true;
        }
    }
    return false;
}

}  // namespace

MentionKind classify_mention(const std::string& mention) {
    std::string s = trim(mention);
    if (s.empty()) return MentionKind::Text;
    if (is_numeric_mention(s)) return MentionKind::Numeric;
    if (is_date_mention(s)) return MentionKind::Date;
    return MentionKind::Text;
}

LinkedCell link_cell(const InvertedIndex& index, int row, int col, const std::string& mention,
                     std::size_t top_n) {
    LinkedCell cell;
    cell.row = row;
    cell.col = col;
    cell.mention = mention;
    cell.kind = classify_mention(mention);
    if (cell.kind == MentionKind::Text) {
        auto hits = index.search(mention, top_n);
        cell.candidates.reserve(hits.size());
        for (const auto& h : hits) cell.candidates.push_back({h.entity_id, h.score});
    }
    return cell;
}

LinkedTable link_table(const InvertedIndex& index, const std::string& table_id,
                       const std::vector<std::vector<std::string>>& cells, std::size_t top_n) {
    if (cells.empty()) throw ValidationError("cannot link an empty table: " + table_id);
    LinkedTable out;
    out.id = table_id;
    out.ncols = static_cast<int>(cells[0].size());
    out.rows.reserve(cells.size());
    for (std::size_t r = 0; r < cells.size(); ++r) {
        if (static_cast<int>(cells[r].size()) != out.ncols) {
            throw ValidationError("table " + table_id + " is not rectangular at row " +
                                  std::to_string(r));
        }
        LinkedRow row;
        row.cells.reserve(cells[r].size());
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            row.cells.push_back(
                link_cell(index, static_cast<int>(r), static_cast<int>(c), cells[r][c], top_n));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace kglink
