#include "itct/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

namespace itct {

namespace fs = std::filesystem;

namespace {

std::string trim_copy(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        cur = trim_copy(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
    if (value == "off" || value == "false" || value == "0" || value == "no") return false;
    throw UsageError("config: " + key + " expects on/off, got '" + value + "'");
}

double parse_num(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config: " + key + " expects a number, got '" + value + "'");
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << text;
}

void write_resolved_config(const PipelineConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    write_text_file((fs::path(cfg.output_dir) / "resolved_config.txt").string(), cfg.resolved_text());
}

Vocabulary subset_vocab(const Vocabulary& vocab, const std::vector<std::string>& cat_names) {
    Vocabulary out;
    for (const auto& name : cat_names) {
        const int col = vocab.column_index(name);
        if (col < 0) throw DataError("vocabulary missing column '" + name + "'");
        out.add_column(name);
        const auto& tokens = vocab.tokens(col);
        for (size_t t = 1; t < tokens.size(); ++t) out.add_token(out.n_columns() - 1, tokens[t]);
    }
    return out;
}

NormalizationStats subset_stats(const NormalizationStats& stats, const std::vector<std::string>& cont_names) {
    NormalizationStats out;
    for (const auto& name : cont_names) {
        const int i = stats.find(name);
        if (i < 0) throw DataError("normalization stats missing column '" + name + "'");
        out.names.push_back(name);
        out.means.push_back(stats.means[i]);
        out.stds.push_back(stats.stds[i]);
    }
    return out;
}

EncodedDataset apply_fraction(const EncodedDataset& ds, double fraction, uint64_t seed) {
    if (fraction >= 1.0) return ds;
    return subset_rows(ds, stratified_sample_indices(ds.labels, fraction, seed));
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineConfig

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (key == "dataset_scan_a") dataset_paths[0] = value;
    else if (key == "dataset_scan_su") dataset_paths[1] = value;
    else if (key == "dataset_sparta") dataset_paths[2] = value;
    else if (key == "dataset_mqtt_bruteforce") dataset_paths[3] = value;
    else if (key == "dataset_normal") dataset_paths[4] = value;
    else if (key == "schema") schema_path = value;
    else if (key == "output_dir") output_dir = value;
    else if (key == "learning_rate") learning_rate = parse_num(key, value);
    else if (key == "weight_decay") weight_decay = parse_num(key, value);
    else if (key == "dropout_rate") dropout_rate = parse_num(key, value);
    else if (key == "batch_size") batch_size = static_cast<size_t>(parse_num(key, value));
    else if (key == "number_of_epochs") epochs = static_cast<int>(parse_num(key, value));
    else if (key == "number_of_transformer_blocks") n_blocks = static_cast<int>(parse_num(key, value));
    else if (key == "number_of_attention_heads") n_heads = static_cast<int>(parse_num(key, value));
    else if (key == "embedding_dimensions") embedding_dim = static_cast<int>(parse_num(key, value));
    else if (key == "mlp_hidden_units_factors") {
        mlp_hidden_factors.clear();
        for (const auto& part : split_commas(value)) mlp_hidden_factors.push_back(parse_num(key, part));
    } else if (key == "feature_selection") feature_selection = parse_bool(key, value);
    else if (key == "callback") callback = parse_bool(key, value);
    else if (key == "patience") patience = static_cast<int>(parse_num(key, value));
    else if (key == "force_include") force_include = split_commas(value);
    else if (key == "fraction") fraction = parse_num(key, value);
    else if (key == "seed") seed = static_cast<uint64_t>(parse_num(key, value));
    else if (key == "forest_trees") forest_trees = static_cast<int>(parse_num(key, value));
    else if (key == "selection_cap_rows") selection_cap_rows = static_cast<size_t>(parse_num(key, value));
    else if (key == "selection_threshold") selection_threshold = value;
    else throw UsageError("config: unknown key '" + key + "'");
}

PipelineConfig PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config file not found: " + path);
    PipelineConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_copy(line);
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config " + path + ": line " + std::to_string(line_no) + " is not 'key = value'");
        cfg.set(trim_copy(line.substr(0, eq)), trim_copy(line.substr(eq + 1)));
    }
    return cfg;
}

std::string PipelineConfig::resolved_text() const {
    std::ostringstream out;
    out << "dataset_scan_a = " << dataset_paths[0] << "\n";
    out << "dataset_scan_su = " << dataset_paths[1] << "\n";
    out << "dataset_sparta = " << dataset_paths[2] << "\n";
    out << "dataset_mqtt_bruteforce = " << dataset_paths[3] << "\n";
    out << "dataset_normal = " << dataset_paths[4] << "\n";
    out << "schema = " << schema_path << "\n";
    out << "output_dir = " << output_dir << "\n";
    out << "learning_rate = " << learning_rate << "\n";
    out << "weight_decay = " << weight_decay << "\n";
    out << "dropout_rate = " << dropout_rate << "\n";
    out << "batch_size = " << batch_size << "\n";
    out << "number_of_epochs = " << epochs << "\n";
    out << "number_of_transformer_blocks = " << n_blocks << "\n";
    out << "number_of_attention_heads = " << n_heads << "\n";
    out << "embedding_dimensions = " << embedding_dim << "\n";
    out << "mlp_hidden_units_factors = ";
    for (size_t i = 0; i < mlp_hidden_factors.size(); ++i) out << (i ? "," : "") << mlp_hidden_factors[i];
    out << "\n";
    out << "feature_selection = " << (feature_selection ? "on" : "off") << "\n";
    out << "callback = " << (callback ? "on" : "off") << "\n";
    out << "patience = " << patience << "\n";
    out << "force_include = ";
    for (size_t i = 0; i < force_include.size(); ++i) out << (i ? "," : "") << force_include[i];
    out << "\n";
    out << "fraction = " << fraction << "\n";
    out << "seed = " << seed << "\n";
    out << "forest_trees = " << forest_trees << "\n";
    out << "selection_cap_rows = " << selection_cap_rows << "\n";
    out << "selection_threshold = " << selection_threshold << "\n";
    return out.str();
}

void PipelineConfig::validate() const {
    if (epochs < 1) throw UsageError("config: number_of_epochs must be >= 1");
    if (batch_size < 1) throw UsageError("config: batch_size must be >= 1");
    if (fraction <= 0.0 || fraction > 1.0) throw UsageError("config: fraction must be in (0, 1]");
    if (embedding_dim < 2) throw UsageError("config: embedding_dimensions must be >= 2");
    if (n_heads < 1 || embedding_dim % n_heads != 0)
        throw UsageError("config: embedding_dimensions must be divisible by number_of_attention_heads");
    if (patience < 1) throw UsageError("config: patience must be >= 1");
    if (forest_trees < 1) throw UsageError("config: forest_trees must be >= 1");
}

Schema PipelineConfig::schema() const {
    return schema_path.empty() ? Schema::default_mqtt() : Schema::load_file(schema_path);
}

std::string PipelineConfig::cache_bin_path() const { return (fs::path(output_dir) / "cache.bin").string(); }
std::string PipelineConfig::cache_json_path() const { return (fs::path(output_dir) / "cache.json").string(); }
std::string PipelineConfig::importances_path() const { return (fs::path(output_dir) / "importances.json").string(); }
std::string PipelineConfig::model_path() const { return (fs::path(output_dir) / "model.itct").string(); }
std::string PipelineConfig::history_csv_path() const { return (fs::path(output_dir) / "history.csv").string(); }
std::string PipelineConfig::history_json_path() const { return (fs::path(output_dir) / "history.json").string(); }

// ---------------------------------------------------------------------------
// preprocess

PreprocessOutcome cmd_preprocess(const PipelineConfig& cfg) {
    write_resolved_config(cfg);
    const Schema schema = cfg.schema();
    for (const auto& path : cfg.dataset_paths)
        if (path.empty()) throw UsageError("all five dataset paths must be configured");

    // files are independent: load and impute concurrently
    std::vector<std::future<DatasetTable>> futures;
    for (const auto& path : cfg.dataset_paths)
        futures.push_back(std::async(std::launch::async, [&schema, path] {
            auto table = load_csv(path, schema);
            return impute_missing(table).first;
        }));
    std::vector<DatasetTable> tables;
    for (auto& f : futures) tables.push_back(f.get());

    const auto balanced = balance_files(tables, mix_seed(cfg.seed, 100));

    nlohmann::ordered_json per_file = nlohmann::ordered_json::array();
    for (size_t i = 0; i < balanced.size(); ++i) {
        const auto [before_n, before_a] = tables[i].class_counts();
        const auto [after_n, after_a] = balanced[i].class_counts();
        per_file.push_back({{"file", cfg.dataset_paths[i]},
                            {"normal_before", before_n},
                            {"attack_before", before_a},
                            {"normal_after", after_n},
                            {"attack_after", after_a}});
    }

    const DatasetTable all = concat_tables(balanced);
    SplitSpec spec;
    spec.seed = mix_seed(cfg.seed, 101);
    const auto splits = split_table(all, spec);

    const NormalizationStats stats = fit_normalization(splits.train);
    const Vocabulary vocab = build_vocabulary(splits.train);
    const auto feature_names = schema.feature_names();

    DatasetCache cache;
    cache.train = encode(splits.train, vocab, stats, feature_names);
    cache.val = encode(splits.val, vocab, stats, feature_names);
    cache.test = encode(splits.test, vocab, stats, feature_names);
    cache.vocab = vocab;
    cache.stats = stats;
    cache.seed = cfg.seed;

    nlohmann::ordered_json summary;
    summary["files"] = per_file;
    auto split_counts = nlohmann::ordered_json::array();
    for (const auto* ds : {&cache.train, &cache.val, &cache.test}) {
        const auto [n0, n1] = ds->class_counts();
        split_counts.push_back({{"rows", ds->n}, {"normal", n0}, {"attack", n1}});
    }
    summary["splits"] = {{"train", split_counts[0]}, {"val", split_counts[1]}, {"test", split_counts[2]}};
    cache.summary = summary;

    write_dataset_cache(cache, cfg.cache_bin_path(), cfg.cache_json_path());
    write_text_file((fs::path(cfg.output_dir) / "preprocess_summary.json").string(), summary.dump(2) + "\n");
    return {summary};
}

// ---------------------------------------------------------------------------
// feature selection

ImportanceReport cmd_select_features(const PipelineConfig& cfg) {
    write_resolved_config(cfg);
    const DatasetCache cache = read_dataset_cache(cfg.cache_bin_path(), cfg.cache_json_path());

    EncodedDataset train = cache.train;
    if (train.n > cfg.selection_cap_rows) {
        const double frac = static_cast<double>(cfg.selection_cap_rows) / static_cast<double>(train.n);
        train = subset_rows(train, stratified_sample_indices(train.labels, frac, mix_seed(cfg.seed, 200)));
    }

    ForestConfig forest_cfg;
    forest_cfg.n_trees = cfg.forest_trees;
    forest_cfg.seed = mix_seed(cfg.seed, 201);
    const Forest forest = fit_forest(train, forest_cfg);

    ImportanceReport report = importance_report(forest);
    if (cfg.selection_threshold == "mean") {
        select(report, ThresholdMode::mean, 0.0, cfg.force_include);
    } else {
        select(report, ThresholdMode::value, parse_num("selection_threshold", cfg.selection_threshold),
               cfg.force_include);
    }
    write_text_file(cfg.importances_path(), report.to_json().dump(2) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// training

namespace {

struct TrainedArtifacts {
    ModelBundle bundle;
    History history;
};

TrainedArtifacts train_on_cache(const DatasetCache& cache, const PipelineConfig& cfg) {
    std::vector<std::string> feature_names;
    if (cfg.feature_selection) {
        std::ifstream in(cfg.importances_path());
        if (!in)
            throw DataError("feature selection is on but " + cfg.importances_path() +
                            " is missing; run select-features first");
        nlohmann::ordered_json j;
        in >> j;
        const auto report = ImportanceReport::from_json(j);
        feature_names = report.selected;
        feature_names.insert(feature_names.end(), report.forced_included.begin(), report.forced_included.end());
        if (feature_names.empty()) throw DataError("importance report selects no features");
    } else {
        for (const auto& f : cache.train.features) feature_names.push_back(f.name);
    }

    EncodedDataset train_set = cache.train;
    EncodedDataset val_set = cache.val;
    if (cfg.feature_selection) {
        train_set = select_columns(train_set, feature_names);
        val_set = select_columns(val_set, feature_names);
    }
    train_set = apply_fraction(train_set, cfg.fraction, mix_seed(cfg.seed, 301));
    val_set = apply_fraction(val_set, cfg.fraction, mix_seed(cfg.seed, 302));

    ModelConfig mc;
    mc.embedding_dim = cfg.embedding_dim;
    mc.n_blocks = cfg.n_blocks;
    mc.n_heads = cfg.n_heads;
    mc.mlp_hidden_factors = cfg.mlp_hidden_factors;
    mc.dropout = cfg.dropout_rate;
    mc.m = train_set.m;
    mc.c = train_set.c;
    mc.vocab_sizes = train_set.vocab_sizes;

    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.weight_decay = cfg.weight_decay;
    tc.batch_size = cfg.batch_size;
    tc.epochs = cfg.epochs;
    tc.dropout = cfg.dropout_rate;
    tc.callback_enabled = cfg.callback;
    tc.patience = cfg.patience;
    tc.seed = mix_seed(cfg.seed, 303);

    TrainedArtifacts out;
    out.bundle.model = ItctModel(mc, mix_seed(cfg.seed, 304));
    out.history = train(out.bundle.model, train_set, val_set, tc);
    out.bundle.vocab = subset_vocab(cache.vocab, train_set.cat_names);
    out.bundle.stats = subset_stats(cache.stats, train_set.cont_names);
    out.bundle.features = train_set.features;
    out.bundle.epochs_ran = static_cast<int>(out.history.epochs.size());
    out.bundle.stop_reason = out.history.stop_reason;
    out.bundle.seed = cfg.seed;
    return out;
}

MetricsReport eval_bundle_on_cache(const ModelBundle& bundle, const DatasetCache& cache, const PipelineConfig& cfg,
                                   const std::string& label, double training_seconds) {
    std::vector<std::string> feature_names;
    for (const auto& f : bundle.features) feature_names.push_back(f.name);
    EncodedDataset test_set = select_columns(cache.test, feature_names);
    if (test_set.vocab_sizes != bundle.model.config().vocab_sizes)
        throw DataError("model/cache feature mismatch: vocabulary sizes differ (was the cache rebuilt?)");
    test_set = apply_fraction(test_set, cfg.fraction, mix_seed(cfg.seed, 305));

    auto timed = measure([&] { return predict_scores(bundle.model, test_set, cfg.batch_size); });
    std::vector<double> scores(timed.result.begin(), timed.result.end());

    const ConfusionMatrix cm = confusion(scores, test_set.labels, 0.5);
    const double auc = auc_roc(scores, test_set.labels);
    return build_report(cm, auc, training_seconds, timed.seconds, bundle.model.count_params(), label);
}

void write_report_files(const MetricsReport& report, const std::string& dir, const std::string& stem) {
    write_text_file((fs::path(dir) / (stem + ".md")).string(), render(report, ReportFormat::markdown));
    write_text_file((fs::path(dir) / (stem + ".csv")).string(), render(report, ReportFormat::csv));
    write_text_file((fs::path(dir) / (stem + ".json")).string(), render(report, ReportFormat::json));
}

}  // namespace

TrainOutcome cmd_train(const PipelineConfig& cfg) {
    cfg.validate();
    write_resolved_config(cfg);
    const DatasetCache cache = read_dataset_cache(cfg.cache_bin_path(), cfg.cache_json_path());
    TrainedArtifacts art = train_on_cache(cache, cfg);
    save_model(art.bundle, cfg.model_path());
    write_text_file(cfg.history_csv_path(), art.history.to_csv());
    write_text_file(cfg.history_json_path(), art.history.to_json().dump(2) + "\n");
    return {std::move(art.history), cfg.model_path(), art.bundle.model.count_params()};
}

MetricsReport cmd_evaluate(const PipelineConfig& cfg, const std::string& model_path, const std::string& label,
                           bool introspect) {
    write_resolved_config(cfg);
    const DatasetCache cache = read_dataset_cache(cfg.cache_bin_path(), cfg.cache_json_path());
    const ModelBundle bundle = load_model(model_path);

    double training_seconds = 0.0;
    std::ifstream hist(cfg.history_json_path());
    if (hist) {
        try {
            nlohmann::ordered_json j;
            hist >> j;
            training_seconds = j.value("total_seconds", 0.0);
        } catch (const std::exception&) {
            training_seconds = 0.0;
        }
    }

    const std::string lbl = label.empty() ? fs::path(model_path).stem().string() : label;
    MetricsReport report = eval_bundle_on_cache(bundle, cache, cfg, lbl, training_seconds);
    write_report_files(report, cfg.output_dir, "report");

    if (introspect) {
        std::vector<std::string> feature_names;
        for (const auto& f : bundle.features) feature_names.push_back(f.name);
        EncodedDataset test_set = select_columns(cache.test, feature_names);
        const size_t n = std::min<size_t>(test_set.n, cfg.batch_size);
        std::vector<uint32_t> rows(n);
        std::iota(rows.begin(), rows.end(), 0u);
        ForwardTrace<float> trace;
        ItctModel model = bundle.model;
        model.forward(gather(test_set, rows), false, 0, &trace);
        nlohmann::ordered_json j;
        auto stage = [](const Mat<float>& m) {
            return nlohmann::ordered_json{{"rows", m.rows()}, {"cols", m.cols()}, {"l2_norm", m.l2_norm()}};
        };
        j["embeddings"] = stage(trace.embeddings);
        j["contextual"] = stage(trace.contextual);
        j["fused"] = stage(trace.fused);
        j["probabilities"] = stage(trace.probs);
        write_text_file((fs::path(cfg.output_dir) / "introspection.json").string(), j.dump(2) + "\n");
    }
    return report;
}

std::vector<MetricsReport> cmd_experiment_matrix(const PipelineConfig& cfg) {
    cfg.validate();
    write_resolved_config(cfg);
    const DatasetCache cache = read_dataset_cache(cfg.cache_bin_path(), cfg.cache_json_path());

    // experiment 1 needs an importance report
    if (!fs::exists(cfg.importances_path())) cmd_select_features(cfg);

    struct Setup {
        const char* label;
        bool fe;
        bool cb;
        const char* stem;
    };
    const Setup setups[] = {
        {"Experiment 1 (w/FE & w/Callback)", true, true, "exp1"},
        {"Experiment 2 (w/o FE & w/o Callback)", false, false, "exp2"},
        {"Experiment 3 (w/o FE & w/Callback)", false, true, "exp3"},
    };

    std::vector<MetricsReport> reports;
    for (const auto& setup : setups) {
        PipelineConfig run = cfg;
        run.feature_selection = setup.fe;
        run.callback = setup.cb;
        TrainedArtifacts art = train_on_cache(cache, run);
        const std::string model_path = (fs::path(cfg.output_dir) / ("model_" + std::string(setup.stem) + ".itct")).string();
        save_model(art.bundle, model_path);
        write_text_file((fs::path(cfg.output_dir) / ("history_" + std::string(setup.stem) + ".csv")).string(),
                        art.history.to_csv());
        write_text_file((fs::path(cfg.output_dir) / ("history_" + std::string(setup.stem) + ".json")).string(),
                        art.history.to_json().dump(2) + "\n");
        reports.push_back(eval_bundle_on_cache(art.bundle, cache, run, setup.label, art.history.total_seconds));
    }

    write_text_file((fs::path(cfg.output_dir) / "comparison.md").string(),
                    render_comparison(reports, ReportFormat::markdown));
    write_text_file((fs::path(cfg.output_dir) / "comparison.csv").string(),
                    render_comparison(reports, ReportFormat::csv));
    write_text_file((fs::path(cfg.output_dir) / "comparison.json").string(),
                    render_comparison(reports, ReportFormat::json));
    return reports;
}

// ---------------------------------------------------------------------------
// prediction

size_t cmd_predict(const PipelineConfig& cfg, const std::string& model_path, const std::string& csv_path,
                   const std::string& out_path) {
    write_resolved_config(cfg);
    const ModelBundle bundle = load_model(model_path);

    std::ifstream in(csv_path);
    if (!in) throw DataError("input file not found: " + csv_path);
    std::string header;
    if (!std::getline(in, header)) throw DataError("empty input file (no header): " + csv_path);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::vector<std::string> cols;
    {
        std::string cur;
        std::istringstream hs(header);
        while (std::getline(hs, cur, ',')) cols.push_back(trim_copy(cur));
    }

    std::vector<int> positions;  // per bundle feature
    std::vector<std::string> missing;
    for (const auto& f : bundle.features) {
        const auto it = std::find(cols.begin(), cols.end(), f.name);
        if (it == cols.end())
            missing.push_back(f.name);
        else
            positions.push_back(static_cast<int>(it - cols.begin()));
    }
    if (!missing.empty()) {
        std::string msg = "input is missing model feature columns:";
        for (const auto& name : missing) msg += " " + name;
        throw DataError(msg);
    }
    size_t extra = 0;
    for (const auto& col : cols) {
        bool used = false;
        for (const auto& f : bundle.features) used = used || f.name == col;
        if (!used) ++extra;
    }
    if (extra > 0)
        std::cerr << "warning: ignoring " << extra << " input column(s) not used by the model\n";

    const auto& mc = bundle.model.config();
    std::vector<int> vocab_col(bundle.features.size(), -1);
    std::vector<int> stats_col(bundle.features.size(), -1);
    {
        for (size_t i = 0; i < bundle.features.size(); ++i) {
            if (bundle.features[i].kind == ColumnKind::categorical)
                vocab_col[i] = bundle.vocab.column_index(bundle.features[i].name);
            else
                stats_col[i] = bundle.stats.find(bundle.features[i].name);
        }
    }

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write predictions: " + out_path);
    out << "row_index,score,prediction\n";

    Batch batch;
    batch.m = mc.m;
    batch.c = mc.c;
    size_t row_index = 0;
    std::vector<size_t> batch_row_ids;
    char score_buf[32];

    auto flush = [&] {
        if (batch.n == 0) return;
        const Mat<float> probs = bundle.model.forward_eval(batch);
        for (size_t i = 0; i < batch.n; ++i) {
            const float p = probs(static_cast<int>(i), 0);
            std::snprintf(score_buf, sizeof(score_buf), "%.6f", static_cast<double>(p));
            out << batch_row_ids[i] << "," << score_buf << "," << (p >= 0.5f ? 1 : 0) << "\n";
        }
        batch = Batch{};
        batch.m = mc.m;
        batch.c = mc.c;
        batch_row_ids.clear();
    };

    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        {
            size_t start = 0;
            while (true) {
                const size_t pos = line.find(',', start);
                if (pos == std::string::npos) {
                    cells.push_back(line.substr(start));
                    break;
                }
                cells.push_back(line.substr(start, pos - start));
                start = pos + 1;
            }
        }
        if (cells.size() != cols.size())
            throw DataError(csv_path + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(cols.size()));
        for (size_t i = 0; i < bundle.features.size(); ++i) {
            const std::string cell = trim_copy(cells[positions[i]]);
            if (bundle.features[i].kind == ColumnKind::categorical) {
                batch.cat.push_back(cell.empty() ? 0 : bundle.vocab.encode(vocab_col[i], cell));
            } else {
                const int s = stats_col[i];
                double v = std::numeric_limits<double>::quiet_NaN();
                if (!cell.empty()) {
                    char* end = nullptr;
                    const double parsed = std::strtod(cell.c_str(), &end);
                    if (end != cell.c_str() && std::isfinite(parsed)) v = parsed;
                }
                // missing or unparseable continuous cells impute to the
                // training mean, which normalizes to zero
                const double sd = bundle.stats.stds[s];
                batch.cont.push_back(
                    std::isnan(v) || sd == 0.0 ? 0.0f : static_cast<float>((v - bundle.stats.means[s]) / sd));
            }
        }
        batch.labels.push_back(0);  // unused in eval
        batch_row_ids.push_back(row_index++);
        ++batch.n;
        if (batch.n >= cfg.batch_size) flush();
    }
    flush();
    if (!out) throw DataError("write failed: " + out_path);
    return row_index;
}

// ---------------------------------------------------------------------------
// fine-tune

FineTuneOutcome cmd_fine_tune(const PipelineConfig& cfg, const std::string& model_path, const std::string& csv_path,
                              double learning_rate, int epochs) {
    write_resolved_config(cfg);
    const ModelBundle probe = load_model(model_path);

    // schema for the incoming CSV: the model's features plus the label column
    Schema schema;
    for (const auto& f : probe.features) schema.columns.push_back({f.name, f.kind});
    schema.columns.push_back({"is_attack", ColumnKind::label});
    schema.validate();
    const DatasetTable data = load_csv(csv_path, schema);

    FineTuneConfig ft;
    ft.learning_rate = learning_rate;
    ft.epochs = epochs;
    ft.batch_size = cfg.batch_size;
    ft.callback_enabled = cfg.callback;
    ft.patience = cfg.patience;
    ft.seed = mix_seed(cfg.seed, 400);
    FineTuneResult result = fine_tune(model_path, data, ft);

    const std::string out_model = (fs::path(cfg.output_dir) / "model_finetuned.itct").string();
    save_model(result.bundle, out_model);
    write_text_file((fs::path(cfg.output_dir) / "history_finetune.csv").string(), result.history.to_csv());
    write_text_file((fs::path(cfg.output_dir) / "history_finetune.json").string(),
                    result.history.to_json().dump(2) + "\n");
    return {std::move(result.history), out_model};
}

}  // namespace itct
