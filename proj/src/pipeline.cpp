#include "kglink/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kglink/text.hpp"

namespace kglink {

using nlohmann::json;

AnnotatedTable annotate_table(const RawTable& table, const InvertedIndex& index,
                              const KnowledgeGraph& kg, const Config& cfg) {
    LinkedTable linked = link_table(index, table.id, table.cells,
                                    static_cast<std::size_t>(cfg.top_n));

    // Column-level facts from the unfiltered table.
    std::vector<bool> all_numeric(static_cast<std::size_t>(linked.ncols), true);
    std::vector<bool> any_candidates(static_cast<std::size_t>(linked.ncols), false);
    for (const auto& row : linked.rows) {
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            if (row.cells[c].kind != MentionKind::Numeric) all_numeric[c] = false;
            if (!row.cells[c].candidates.empty()) any_candidates[c] = true;
        }
    }

    auto pruned = prune_table(linked, kg);
    FilteredTable filtered = filter_rows(table.id, linked.ncols, std::move(pruned),
                                         static_cast<std::size_t>(cfg.top_k_rows),
                                         cfg.row_filter_mode());

    AnnotatedTable out;
    out.id = table.id;
    out.ncols = linked.ncols;
    out.retained_row_ids = filtered.retained_row_ids;
    out.total_rows = filtered.total_rows;
    for (const auto& row : filtered.rows) {
        std::vector<std::string> mentions;
        mentions.reserve(row.cells.size());
        for (const auto& cell : row.cells) mentions.push_back(cell.mention);
        out.cells.push_back(std::move(mentions));
    }
    for (int c = 0; c < linked.ncols; ++c) {
        AnnotatedColumn col;
        col.index = c;
        col.label = table.labels[static_cast<std::size_t>(c)];
        col.target = col.label.has_value();
        col.kg_linked = any_candidates[static_cast<std::size_t>(c)];
        col.candidates = column_candidates(filtered, c, kg,
                                           static_cast<std::size_t>(cfg.types_per_column),
                                           all_numeric[static_cast<std::size_t>(c)]);
        auto [tokens, source] = build_feature_tokens(filtered, c, kg);
        col.feature_tokens = std::move(tokens);
        col.feature_entity = source;
        out.columns.push_back(std::move(col));
    }
    return out;
}

std::vector<AnnotatedTable> annotate_corpus(const TableCorpus& corpus, const InvertedIndex& index,
                                            const KnowledgeGraph& kg, const Config& cfg) {
    std::vector<AnnotatedTable> out(corpus.tables.size());
    int workers = std::max(1, cfg.workers);
    if (workers == 1 || corpus.tables.size() < 2) {
        for (std::size_t i = 0; i < corpus.tables.size(); ++i) {
            out[i] = annotate_table(corpus.tables[i], index, kg, cfg);
        }
        return out;
    }
    std::vector<std::thread> threads;
    std::size_t per = (corpus.tables.size() + static_cast<std::size_t>(workers) - 1) /
                      static_cast<std::size_t>(workers);
    for (int w = 0; w < workers; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * per;
        std::size_t end = std::min(corpus.tables.size(), begin + per);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end]() {
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = annotate_table(corpus.tables[i], index, kg, cfg);
            }
        });
    }
    for (auto& t : threads) t.join();
    return out;
}

namespace {

ModelItem build_item_chunk(const AnnotatedTable& table, const SerializedInput& plain,
                           const SerializedInput& masked, const SerializedInput* gt,
                           const Vocabulary& vocab,
                           const std::map<std::string, int>& label_ids, const Config& cfg,
                           const KnowledgeGraph* /*unused*/) {
    ModelItem item;
    item.table_id = table.id;
    item.plain = plain;
    item.masked = masked;
    if (gt) {
        item.ground_truth = *gt;
        item.has_ground_truth = true;
    }
    for (const auto& span : plain.columns) {
        int c = span.original_column;
        const AnnotatedColumn& col = table.columns[static_cast<std::size_t>(c)];
        item.original_columns.push_back(c);
        item.no_kg_linkage.push_back(!col.kg_linked);
        int label_id = -1;
        if (col.target && col.label) {
            auto it = label_ids.find(*col.label);
            label_id = it == label_ids.end() ? -1 : it->second;
        }
        item.label_ids.push_back(label_id);
        if (cfg.disable_feature_vector) {
            FeatureSequence fs;
            fs.ids.push_back(Vocabulary::kPad);
            item.features.push_back(std::move(fs));
        } else {
            item.features.push_back(encode_feature_tokens(col.feature_tokens, col.feature_entity,
                                                          vocab, cfg.feature_budget));
        }
    }
    return item;
}

}  // namespace

std::vector<ModelItem> build_items(const std::vector<const AnnotatedTable*>& tables,
                                   const Vocabulary& vocab,
                                   const std::vector<std::string>& eval_labels,
                                   const Config& cfg) {
    std::map<std::string, int> label_ids;
    for (std::size_t i = 0; i < eval_labels.size(); ++i) {
        label_ids.emplace(eval_labels[i], static_cast<int>(i));
    }
    SerializeBudgets budgets{cfg.col_token_budget, cfg.column_cap, cfg.max_seq};
    const bool disable_types = cfg.disable_candidate_types;

    std::vector<ModelItem> out;
    for (const AnnotatedTable* table : tables) {
        bool has_labels = false;
        for (const auto& col : table->columns) {
            if (col.target) has_labels = true;
        }
        auto plain = serialize_table(*table, SerializeMode::Plain, vocab, budgets, disable_types);
        auto masked = serialize_table(*table, SerializeMode::Masked, vocab, budgets, disable_types);
        std::vector<SerializedInput> gt;
        if (has_labels) {
            gt = serialize_table(*table, SerializeMode::GroundTruth, vocab, budgets, disable_types);
        }
        for (std::size_t chunk = 0; chunk < plain.size(); ++chunk) {
            out.push_back(build_item_chunk(*table, plain[chunk], masked[chunk],
                                           has_labels ? &gt[chunk] : nullptr, vocab, label_ids,
                                           cfg, nullptr));
        }
    }
    return out;
}

PreparedCorpus prepare_corpus(const TableCorpus& corpus, const KnowledgeGraph& kg,
                              const InvertedIndex& index, const Config& cfg,
                              std::vector<std::string>* warnings) {
    PreparedCorpus prep;
    prep.split = stratified_split(corpus, cfg.seed, cfg.train_ratio, cfg.val_ratio,
                                  cfg.test_ratio, warnings);

    std::vector<const RawTable*> train_tables;
    for (int i : prep.split.train) train_tables.push_back(&corpus.tables[static_cast<std::size_t>(i)]);
    prep.vocab = Vocabulary::build(train_tables, kg);

    // Label universe: training split only. Unseen eval labels are appended
    // after the model's output space so they can be scored (always wrong).
    std::set<std::string> train_labels;
    for (const RawTable* t : train_tables) {
        for (const auto& l : t->labels) {
            if (l) train_labels.insert(*l);
        }
    }
    prep.labels.assign(train_labels.begin(), train_labels.end());
    prep.eval_labels = prep.labels;
    std::set<std::string> extra;
    for (const auto& t : corpus.tables) {
        for (const auto& l : t.labels) {
            if (l && !train_labels.count(*l)) extra.insert(*l);
        }
    }
    for (const auto& l : extra) {
        prep.eval_labels.push_back(l);
        if (warnings) {
            warnings->push_back("label '" + l +
                                "' is absent from the training split; its columns will be "
                                "counted as wrong");
        }
    }

    prep.annotated = annotate_corpus(corpus, index, kg, cfg);

    auto items_for = [&](const std::vector<int>& idx) {
        std::vector<const AnnotatedTable*> tables;
        for (int i : idx) tables.push_back(&prep.annotated[static_cast<std::size_t>(i)]);
        return build_items(tables, prep.vocab, prep.eval_labels, cfg);
    };
    prep.train_items = items_for(prep.split.train);
    prep.val_items = items_for(prep.split.val);
    prep.test_items = items_for(prep.split.test);
    return prep;
}

EvalOutcome evaluate_items(ModelState& state, const std::vector<ModelItem>& items,
                           const std::vector<std::string>& eval_labels) {
    EvalOutcome out;
    auto predictions = predict(state, items, false);
    std::size_t pi = 0;
    for (const auto& item : items) {
        for (std::size_t c = 0; c < item.label_ids.size(); ++c) {
            const Prediction& pred = predictions[pi++];
            if (item.label_ids[c] < 0) continue;
            out.preds.push_back(pred.label_id);
            out.gts.push_back(item.label_ids[c]);
            out.no_kg_linkage.push_back(item.no_kg_linkage[c]);
        }
    }
    if (!out.preds.empty()) out.report = compute_metrics(out.preds, out.gts, eval_labels);
    return out;
}

TrainOutcome run_training(const TableCorpus& corpus, const KnowledgeGraph& kg,
                          const InvertedIndex& index, const Config& cfg,
                          std::vector<std::string>* warnings) {
    PreparedCorpus prep = prepare_corpus(corpus, kg, index, cfg, warnings);

    ModelDims dims;
    dims.vocab = prep.vocab.size();
    dims.dim = cfg.hidden_dim;
    dims.layers = cfg.layers;
    dims.heads = cfg.heads;
    dims.max_seq = cfg.max_seq;
    dims.labels = static_cast<int>(prep.labels.size());
    if (dims.labels == 0) throw ValidationError("training requires at least one labeled column");

    TrainOutcome out{ModelState::create(dims, prep.vocab, prep.labels, cfg), {}, {}, {}, {}};
    out.history = train_model(out.state, prep.train_items, prep.val_items);

    if (!prep.val_items.empty()) {
        auto val = evaluate_items(out.state, prep.val_items, prep.eval_labels);
        out.val_report = val.report;
    }
    out.test_outcome = evaluate_items(out.state, prep.test_items, prep.eval_labels);
    out.test_report = out.test_outcome.report;
    return out;
}

std::vector<ComparisonRow> run_ablation(
    const TableCorpus& corpus, const KnowledgeGraph& kg, const InvertedIndex& index,
    const Config& base,
    const std::vector<std::pair<std::string, std::function<void(Config&)>>>& variants) {
    std::vector<ComparisonRow> rows;
    for (const auto& [name, mutate] : variants) {
        Config cfg = base;
        mutate(cfg);
        cfg.validate();
        auto start = std::chrono::steady_clock::now();
        TrainOutcome outcome = run_training(corpus, kg, index, cfg);
        auto end = std::chrono::steady_clock::now();
        ComparisonRow row;
        row.name = name;
        row.accuracy = outcome.test_report.accuracy;
        row.weighted_f1 = outcome.test_report.weighted_f1;
        row.wall_seconds = std::chrono::duration<double>(end - start).count();
        rows.push_back(row);
    }
    return rows;
}

std::vector<ComparisonRow> compare_row_filters(const TableCorpus& corpus,
                                               const KnowledgeGraph& kg,
                                               const InvertedIndex& index, const Config& base,
                                               const std::vector<int>& k_values) {
    std::vector<std::pair<std::string, std::function<void(Config&)>>> variants;
    for (int k : k_values) {
        variants.emplace_back("sorted_k" + std::to_string(k), [k](Config& c) {
            c.row_filter = "sorted";
            c.top_k_rows = k;
        });
        variants.emplace_back("original_k" + std::to_string(k), [k](Config& c) {
            c.row_filter = "original";
            c.top_k_rows = k;
        });
    }
    return run_ablation(corpus, kg, index, base, variants);
}

namespace {

json column_to_json(const AnnotatedColumn& col) {
    json j;
    j["index"] = col.index;
    j["kg_linked"] = col.kg_linked;
    if (col.label) j["label"] = *col.label;
    switch (col.candidates.kind) {
        case ColumnKind::Typed: {
            j["kind"] = "typed";
            auto types = json::array();
            for (const auto& t : col.candidates.types) {
                types.push_back({{"type_id", t.type_id}, {"label", t.label}, {"cts", t.cts}});
            }
            j["candidate_types"] = types;
            break;
        }
        case ColumnKind::NumericSummary: {
            j["kind"] = "numeric";
            const auto& s = *col.candidates.summary;
            j["summary"] = {{"mean", s.mean}, {"variance", s.variance}, {"median", s.median}};
            break;
        }
        case ColumnKind::Padding:
            j["kind"] = "padding";
            break;
    }
    if (col.feature_entity) j["feature_entity"] = *col.feature_entity;
    j["feature_tokens"] = col.feature_tokens;
    return j;
}

}  // namespace

std::string annotation_report_jsonl(const std::vector<AnnotatedTable>& tables) {
    std::ostringstream out;
    for (const auto& t : tables) {
        json j;
        j["table"] = t.id;
        j["total_rows"] = t.total_rows;
        j["retained_rows"] = t.retained_row_ids;
        auto cols = json::array();
        for (const auto& c : t.columns) cols.push_back(column_to_json(c));
        j["columns"] = cols;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::string annotation_report_text(const std::vector<AnnotatedTable>& tables) {
    std::ostringstream out;
    for (const auto& t : tables) {
        out << "table " << t.id << ": " << t.retained_row_ids.size() << "/" << t.total_rows
            << " rows retained\n";
        for (const auto& c : t.columns) {
            out << "  col " << c.index;
            if (c.label) out << " [" << *c.label << "]";
            switch (c.candidates.kind) {
                case ColumnKind::Typed:
                    out << " types:";
                    for (const auto& ct : c.candidates.types) {
                        out << " " << ct.label << "(" << ct.cts << ")";
                    }
                    break;
                case ColumnKind::NumericSummary: {
                    const auto& s = *c.candidates.summary;
                    out << " numeric mean=" << format_sig4(s.mean)
                        << " var=" << format_sig4(s.variance) << " med=" << format_sig4(s.median);
                    break;
                }
                case ColumnKind::Padding:
                    out << " padding";
                    break;
            }
            if (c.feature_entity) out << " fv=" << *c.feature_entity;
            out << "\n";
        }
    }
    return out.str();
}

std::string serialized_dump_jsonl(const std::vector<AnnotatedTable>& tables,
                                  const Vocabulary& vocab, const Config& cfg) {
    SerializeBudgets budgets{cfg.col_token_budget, cfg.column_cap, cfg.max_seq};
    std::ostringstream out;
    for (const auto& t : tables) {
        auto chunks =
            serialize_table(t, SerializeMode::Plain, vocab, budgets, cfg.disable_candidate_types);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            json j;
            j["table"] = t.id;
            j["chunk"] = i;
            j["ids"] = chunks[i].ids;
            auto spans = json::array();
            for (const auto& s : chunks[i].columns) {
                json sj;
                sj["column"] = s.original_column;
                sj["colstart"] = s.colstart_pos;
                if (s.mask_pos) sj["mask"] = *s.mask_pos;
                spans.push_back(sj);
            }
            j["columns"] = spans;
            j["cell_tokens_dropped"] = chunks[i].truncation.cell_tokens_dropped;
            out << j.dump() << "\n";
        }
    }
    return out.str();
}

}  // namespace kglink
