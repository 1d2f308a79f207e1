#pragma once

#include <array>
#include <string>
#include <vector>

#include "itct/cache_io.hpp"
#include "itct/featsel.hpp"
#include "itct/metrics.hpp"
#include "itct/model.hpp"
#include "itct/training.hpp"

namespace itct {

// Resolved run configuration; file keys mirror the model's hyperparameter
// names (learning_rate, weight_decay, dropout_rate, batch_size,
// number_of_epochs, number_of_transformer_blocks, number_of_attention_heads,
// embedding_dimensions, mlp_hidden_units_factors).
struct PipelineConfig {
    std::array<std::string, 5> dataset_paths;  // scan_a, scan_su, sparta, mqtt_bruteforce, normal
    std::string schema_path;                   // empty = built-in MQTT schema
    std::string output_dir = "out";

    double learning_rate = 0.001;
    double weight_decay = 0.0001;
    double dropout_rate = 0.2;
    size_t batch_size = 265;
    int epochs = 20;
    int n_blocks = 4;
    int n_heads = 4;
    int embedding_dim = 16;
    std::vector<double> mlp_hidden_factors = {2.0, 1.0};

    bool feature_selection = true;
    bool callback = true;
    int patience = 3;
    std::vector<std::string> force_include = {"protocol"};

    double fraction = 1.0;  // stratified subsample of the cache
    uint64_t seed = 42;

    int forest_trees = 100;
    size_t selection_cap_rows = 500000;
    std::string selection_threshold = "mean";  // "mean" or a numeric value

    static PipelineConfig load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string resolved_text() const;
    void validate() const;

    Schema schema() const;
    std::string cache_bin_path() const;
    std::string cache_json_path() const;
    std::string importances_path() const;
    std::string model_path() const;
    std::string history_csv_path() const;
    std::string history_json_path() const;
};

struct PreprocessOutcome {
    nlohmann::ordered_json summary;
};

PreprocessOutcome cmd_preprocess(const PipelineConfig& cfg);
ImportanceReport cmd_select_features(const PipelineConfig& cfg);

struct TrainOutcome {
    History history;
    std::string model_path;
    int64_t total_weights = 0;
};

TrainOutcome cmd_train(const PipelineConfig& cfg);

MetricsReport cmd_evaluate(const PipelineConfig& cfg, const std::string& model_path, const std::string& label = "",
                           bool introspect = false);

std::vector<MetricsReport> cmd_experiment_matrix(const PipelineConfig& cfg);

// Writes row_index,score,prediction; returns the number of scored rows.
size_t cmd_predict(const PipelineConfig& cfg, const std::string& model_path, const std::string& csv_path,
                   const std::string& out_path);

struct FineTuneOutcome {
    History history;
    std::string model_path;
};

FineTuneOutcome cmd_fine_tune(const PipelineConfig& cfg, const std::string& model_path, const std::string& csv_path,
                              double learning_rate, int epochs);

}  // namespace itct
