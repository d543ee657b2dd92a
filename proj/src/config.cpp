#include "kglink/config.hpp"

#include <set>

#include "json.hpp"

namespace kglink {

using nlohmann::json;

ComposeMode Config::compose_mode() const {
    if (compose == "linear") return ComposeMode::Linear;
    if (compose == "sum") return ComposeMode::Sum;
    throw ConfigError("compose must be 'linear' or 'sum', got '" + compose + "'");
}

DmlmDirection Config::dmlm_mode() const {
    if (dmlm_direction == "msk_gt") return DmlmDirection::MaskOnGt;
    if (dmlm_direction == "gt_msk") return DmlmDirection::GtOnMask;
    throw ConfigError("dmlm_direction must be 'msk_gt' or 'gt_msk', got '" + dmlm_direction + "'");
}

RowFilterMode Config::row_filter_mode() const {
    if (row_filter == "sorted") return RowFilterMode::ScoreSorted;
    if (row_filter == "original") return RowFilterMode::OriginalOrder;
    throw ConfigError("row_filter must be 'sorted' or 'original', got '" + row_filter + "'");
}

void Config::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(top_n >= 1, "top_n must be >= 1");
    require(types_per_column >= 1, "types_per_column must be >= 1");
    require(top_k_rows >= 1, "top_k_rows must be >= 1");
    require(col_token_budget >= 1, "col_token_budget must be >= 1");
    require(column_cap >= 1, "column_cap must be >= 1");
    require(max_seq >= 8, "max_seq must be >= 8");
    require(feature_budget >= 1, "feature_budget must be >= 1");
    require(bm25_k1 >= 0.0, "bm25_k1 must be >= 0");
    require(bm25_b >= 0.0 && bm25_b <= 1.0, "bm25_b must be in [0, 1]");
    require(hidden_dim >= 4, "hidden_dim must be >= 4");
    require(layers >= 1, "layers must be >= 1");
    require(heads >= 1 && hidden_dim % heads == 0, "heads must divide hidden_dim");
    require(temperature > 1.0, "temperature must be > 1");
    require(learning_rate > 0.0, "learning_rate must be > 0");
    require(weight_decay >= 0.0, "weight_decay must be >= 0");
    require(epochs >= 1, "epochs must be >= 1");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
    require(patience >= 1, "patience must be >= 1");
    require(workers >= 1, "workers must be >= 1");
    double ratio_sum = train_ratio + val_ratio + test_ratio;
    require(std::abs(ratio_sum - 1.0) < 1e-9, "split ratios must sum to 1");
    require(train_ratio > 0.0 && val_ratio >= 0.0 && test_ratio >= 0.0, "split ratios must be >= 0");
    compose_mode();
    dmlm_mode();
    row_filter_mode();
}

namespace {

// Field table shared by the reader and the writer so the two cannot drift.
template <typename F>
void for_each_field(Config& c, F&& f) {
    f("kg_path", c.kg_path);
    f("tables_path", c.tables_path);
    f("labels_path", c.labels_path);
    f("out_dir", c.out_dir);
    f("index_cache", c.index_cache);
    f("checkpoint", c.checkpoint);
    f("top_n", c.top_n);
    f("types_per_column", c.types_per_column);
    f("top_k_rows", c.top_k_rows);
    f("col_token_budget", c.col_token_budget);
    f("column_cap", c.column_cap);
    f("max_seq", c.max_seq);
    f("feature_budget", c.feature_budget);
    f("bm25_k1", c.bm25_k1);
    f("bm25_b", c.bm25_b);
    f("row_filter", c.row_filter);
    f("hidden_dim", c.hidden_dim);
    f("layers", c.layers);
    f("heads", c.heads);
    f("temperature", c.temperature);
    f("learning_rate", c.learning_rate);
    f("weight_decay", c.weight_decay);
    f("epochs", c.epochs);
    f("batch_size", c.batch_size);
    f("dropout", c.dropout);
    f("patience", c.patience);
    f("seed", c.seed);
    f("disable_masked_task", c.disable_masked_task);
    f("disable_candidate_types", c.disable_candidate_types);
    f("disable_feature_vector", c.disable_feature_vector);
    f("compose", c.compose);
    f("dmlm_direction", c.dmlm_direction);
    f("train_ratio", c.train_ratio);
    f("val_ratio", c.val_ratio);
    f("test_ratio", c.test_ratio);
    f("workers", c.workers);
}

}  // namespace

std::string Config::to_json_string() const {
    json j = json::object();
    Config copy = *this;
    for_each_field(copy, [&](const char* key, auto& value) { j[key] = value; });
    return j.dump(2) + "\n";
}

Config Config::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    Config c;
    std::set<std::string> known;
    for_each_field(c, [&](const char* key, auto& value) {
        known.insert(key);
        if (j.contains(key)) {
            try {
                value = j[key].get<std::decay_t<decltype(value)>>();
            } catch (const json::exception&) {
                throw ConfigError(std::string("config key '") + key + "' has the wrong type");
            }
        }
    });
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    return c;
}

Config Config::from_json_file(const std::string& path) {
    return from_json_string(read_file(path));
}

}  // namespace kglink
