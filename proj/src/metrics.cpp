#include "kglink/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace kglink {

SplitResult stratified_split(const TableCorpus& corpus, std::uint64_t seed, double train_ratio,
                             double val_ratio, double test_ratio,
                             std::vector<std::string>* warnings) {
    if (corpus.tables.empty()) throw ValidationError("cannot split an empty corpus");
    double sum = train_ratio + val_ratio + test_ratio;
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");

    // Stratification key: label of the table's first target column.
    std::map<std::string, std::vector<int>> by_class;
    for (std::size_t i = 0; i < corpus.tables.size(); ++i) {
        const RawTable& t = corpus.tables[i];
        std::string key = "<unlabeled>";
        for (const auto& l : t.labels) {
            if (l) {
                key = *l;
                break;
            }
        }
        by_class[key].push_back(static_cast<int>(i));
    }

    SplitResult out;
    Rng rng(seed);
    for (auto& [cls, indices] : by_class) {
        if (indices.size() < 3) {
            if (warnings) {
                warnings->push_back("class '" + cls + "' has only " +
                                    std::to_string(indices.size()) +
                                    " table(s); assigning all to train");
            }
            out.train.insert(out.train.end(), indices.begin(), indices.end());
            continue;
        }
        rng.shuffle(indices);
        std::size_t n = indices.size();
        double exact[3] = {train_ratio * n, val_ratio * n, test_ratio * n};
        std::size_t take[3] = {static_cast<std::size_t>(exact[0]), static_cast<std::size_t>(exact[1]),
                               static_cast<std::size_t>(exact[2])};
        std::size_t assigned = take[0] + take[1] + take[2];
        // Largest remainder; ties resolved train > val > test.
        while (assigned < n) {
            double rem[3] = {exact[0] - static_cast<double>(take[0]),
                             exact[1] - static_cast<double>(take[1]),
                             exact[2] - static_cast<double>(take[2])};
            int best = 0;
            for (int s = 1; s < 3; ++s) {
                if (rem[s] > rem[best] + 1e-12) best = s;
            }
            ++take[best];
            ++assigned;
        }
        std::size_t pos = 0;
        for (std::size_t i = 0; i < take[0]; ++i) out.train.push_back(indices[pos++]);
        for (std::size_t i = 0; i < take[1]; ++i) out.val.push_back(indices[pos++]);
        for (std::size_t i = 0; i < take[2]; ++i) out.test.push_back(indices[pos++]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

double accuracy(const std::vector<int>& preds, const std::vector<int>& gts) {
    if (preds.size() != gts.size()) throw ValidationError("prediction/label length mismatch");
    if (preds.empty()) throw ValidationError("cannot compute accuracy of an empty set");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == gts[i]) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(preds.size());
}

double weighted_f1(const std::vector<int>& preds, const std::vector<int>& gts, int n_labels) {
    if (preds.size() != gts.size()) throw ValidationError("prediction/label length mismatch");
    if (preds.empty()) throw ValidationError("cannot compute weighted F1 of an empty set");
    std::vector<int> tp(static_cast<std::size_t>(n_labels), 0);
    std::vector<int> fp(static_cast<std::size_t>(n_labels), 0);
    std::vector<int> fn(static_cast<std::size_t>(n_labels), 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        int p = preds[i];
        int g = gts[i];
        if (g < 0 || g >= n_labels) throw ValidationError("label id out of range");
        if (p == g) {
            ++tp[static_cast<std::size_t>(g)];
        } else {
            ++fn[static_cast<std::size_t>(g)];
            if (p >= 0 && p < n_labels) ++fp[static_cast<std::size_t>(p)];
        }
    }
    double weighted = 0.0;
    for (int c = 0; c < n_labels; ++c) {
        auto uc = static_cast<std::size_t>(c);
        int support = tp[uc] + fn[uc];
        if (support == 0) continue;
        double prec = tp[uc] + fp[uc] > 0
                          ? static_cast<double>(tp[uc]) / static_cast<double>(tp[uc] + fp[uc])
                          : 0.0;
        double rec = static_cast<double>(tp[uc]) / static_cast<double>(support);
        double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        weighted += f1 * static_cast<double>(support) / static_cast<double>(preds.size());
    }
    return weighted;
}

MetricsReport compute_metrics(const std::vector<int>& preds, const std::vector<int>& gts,
                              const std::vector<std::string>& labels) {
    MetricsReport rep;
    int n_labels = static_cast<int>(labels.size());
    rep.accuracy = accuracy(preds, gts);
    rep.weighted_f1 = weighted_f1(preds, gts, n_labels);
    rep.total = static_cast<int>(preds.size());
    rep.confusion.assign(static_cast<std::size_t>(n_labels),
                         std::vector<int>(static_cast<std::size_t>(n_labels), 0));
    std::vector<int> tp(static_cast<std::size_t>(n_labels), 0);
    std::vector<int> fp(static_cast<std::size_t>(n_labels), 0);
    std::vector<int> fn(static_cast<std::size_t>(n_labels), 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        int p = preds[i];
        int g = gts[i];
        if (p >= 0 && p < n_labels) ++rep.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
        if (p == g) {
            ++tp[static_cast<std::size_t>(g)];
        } else {
            ++fn[static_cast<std::size_t>(g)];
            if (p >= 0 && p < n_labels) ++fp[static_cast<std::size_t>(p)];
        }
    }
    for (int c = 0; c < n_labels; ++c) {
        auto uc = static_cast<std::size_t>(c);
        ClassMetrics cm;
        cm.label = labels[uc];
        cm.support = tp[uc] + fn[uc];
        cm.precision = tp[uc] + fp[uc] > 0
                           ? static_cast<double>(tp[uc]) / static_cast<double>(tp[uc] + fp[uc])
                           : 0.0;
        cm.recall = cm.support > 0 ? static_cast<double>(tp[uc]) / static_cast<double>(cm.support)
                                   : 0.0;
        cm.f1 = cm.precision + cm.recall > 0.0
                    ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                    : 0.0;
        rep.per_class.push_back(cm);
    }
    return rep;
}

std::string MetricsReport::to_json_string() const {
    nlohmann::json j;
    j["accuracy"] = accuracy;
    j["weighted_f1"] = weighted_f1;
    j["total"] = total;
    auto classes = nlohmann::json::array();
    for (const auto& c : per_class) {
        classes.push_back({{"label", c.label},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support}});
    }
    j["classes"] = classes;
    j["confusion"] = confusion;
    return j.dump(2) + "\n";
}

std::string MetricsReport::to_text() const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "accuracy %.4f  weighted_f1 %.4f  (n=%d)\n", accuracy,
                  weighted_f1, total);
    out << line;
    std::snprintf(line, sizeof(line), "%-16s %9s %9s %9s %9s\n", "class", "precision", "recall",
                  "f1", "support");
    out << line;
    for (const auto& c : per_class) {
        std::snprintf(line, sizeof(line), "%-16s %9.4f %9.4f %9.4f %9d\n", c.label.c_str(),
                      c.precision, c.recall, c.f1, c.support);
        out << line;
    }
    return out.str();
}

}  // namespace kglink
