#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itct/dataset.hpp"
#include "json.hpp"

namespace itct {

struct ForestConfig {
    int n_trees = 100;
    int max_depth = -1;  // unlimited
    int min_samples_split = 2;
    double features_per_split = 0.0;  // fraction of features; 0 = sqrt rule
    bool bootstrap = true;
    uint64_t seed = 0;

    void validate() const;
};

struct TreeNode {
    bool is_leaf = true;
    int64_t count0 = 0, count1 = 0;
    int64_t n_samples = 0;
    int feature = -1;
    double threshold = 0.0;  // midpoint for continuous, token id for categorical
    bool equality = false;   // categorical: left branch is (x == threshold)
    double impurity_decrease = 0.0;  // node-local Gini gain
    int left = -1, right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;
};

struct Forest {
    std::vector<Tree> trees;
    int n_features = 0;
    std::vector<std::string> feature_names;
    std::vector<uint8_t> is_categorical;
};

// Feature columns in schema order; categorical cells hold token ids.
struct FeatureMatrix {
    size_t n = 0;
    int f = 0;
    std::vector<double> x;  // row-major
    std::vector<uint8_t> y;
    std::vector<std::string> names;
    std::vector<uint8_t> is_categorical;

    double at(size_t row, int feature) const { return x[row * f + feature]; }
    static FeatureMatrix from_encoded(const EncodedDataset& ds);
};

Forest fit_forest(const FeatureMatrix& data, const ForestConfig& config);
Forest fit_forest(const EncodedDataset& train, const ForestConfig& config);

// Mean decrease in impurity, averaged over trees and normalized to sum to 1
// when any split exists.
std::vector<double> forest_importances(const Forest& forest);

struct ImportanceReport {
    std::vector<std::string> names;  // schema order
    std::vector<double> importances;
    double threshold = 0.0;
    std::vector<std::string> selected;         // descending importance, then schema order
    std::vector<std::string> forced_included;  // force-include names not already selected

    nlohmann::ordered_json to_json() const;
    static ImportanceReport from_json(const nlohmann::ordered_json& j);
};

ImportanceReport importance_report(const Forest& forest);

enum class ThresholdMode { mean, value };

// Fills report.selected/forced_included/threshold and returns the combined
// feature list (selected then forced).
std::vector<std::string> select(ImportanceReport& report, ThresholdMode mode, double threshold_value,
                                const std::vector<std::string>& force_include);

}  // namespace itct
