#include "itct/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace itct {

namespace {

// 1 - p0^2 - p1^2 == 2*c0*c1/n^2; products stay exact in double for our sizes
double gini(int64_t c0, int64_t c1) {
    const int64_t n = c0 + c1;
    if (n == 0) return 0.0;
    return 2.0 * static_cast<double>(c0) * static_cast<double>(c1) / (static_cast<double>(n) * static_cast<double>(n));
}

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool equality = false;
    bool found = false;
};

struct TreeBuilder {
    const FeatureMatrix& data;
    const ForestConfig& cfg;
    Rng& rng;
    Tree& tree;
    std::vector<std::pair<double, uint8_t>> scratch;

    TreeBuilder(const FeatureMatrix& d, const ForestConfig& c, Rng& r, Tree& t) : data(d), cfg(c), rng(r), tree(t) {}

    int features_per_split() const {
        if (cfg.features_per_split == 0.0)
            return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(data.f))));
        return std::max(1, static_cast<int>(std::ceil(cfg.features_per_split * data.f)));
    }

    std::vector<int> draw_feature_subset() {
        const int k = std::min(features_per_split(), data.f);
        std::vector<int> idx(data.f);
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k && i + 1 < data.f; ++i) {
            const int j = i + static_cast<int>(rng.below(data.f - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());  // ascending order drives the tie-break
        return idx;
    }

    // Best Gini split over the node rows; higher gain wins, ties go to the
    // lower feature index then the lower threshold (strict > replacement).
    BestSplit find_split(const std::vector<uint32_t>& rows, int64_t c0, int64_t c1) {
        BestSplit best;
        const int64_t n = static_cast<int64_t>(rows.size());
        const double parent = gini(c0, c1);
        for (int feature : draw_feature_subset()) {
            scratch.clear();
            for (uint32_t r : rows) scratch.emplace_back(data.at(r, feature), data.y[r]);
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (scratch.front().first == scratch.back().first) continue;  // constant in node

            if (data.is_categorical[feature]) {
                // equality split per unique token id, ascending
                size_t i = 0;
                while (i < scratch.size()) {
                    const double v = scratch[i].first;
                    int64_t in0 = 0, in1 = 0;
                    size_t j = i;
                    while (j < scratch.size() && scratch[j].first == v) {
                        if (scratch[j].second)
                            ++in1;
                        else
                            ++in0;
                        ++j;
                    }
                    const int64_t nl = in0 + in1;
                    const int64_t nr = n - nl;
                    if (nl > 0 && nr > 0) {
                        const double gain = parent -
                                            (static_cast<double>(nl) * gini(in0, in1) +
                                             static_cast<double>(nr) * gini(c0 - in0, c1 - in1)) /
                                                static_cast<double>(n);
                        if (gain > 0.0 && (!best.found || gain > best.gain)) best = {gain, feature, v, true, true};
                    }
                    i = j;
                }
            } else {
                int64_t l0 = 0, l1 = 0;
                for (size_t i = 0; i + 1 < scratch.size(); ++i) {
                    if (scratch[i].second)
                        ++l1;
                    else
                        ++l0;
                    if (scratch[i].first == scratch[i + 1].first) continue;
                    const double thr = scratch[i].first + (scratch[i + 1].first - scratch[i].first) / 2.0;
                    const int64_t nl = l0 + l1;
                    const int64_t nr = n - nl;
                    const double gain = parent -
                                        (static_cast<double>(nl) * gini(l0, l1) +
                                         static_cast<double>(nr) * gini(c0 - l0, c1 - l1)) /
                                            static_cast<double>(n);
                    if (gain > 0.0 && (!best.found || gain > best.gain)) best = {gain, feature, thr, false, true};
                }
            }
        }
        return best;
    }

    int build(std::vector<uint32_t>&& rows, int depth) {
        int64_t c1 = 0;
        for (uint32_t r : rows) c1 += data.y[r];
        const int64_t c0 = static_cast<int64_t>(rows.size()) - c1;

        const int node_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_idx].count0 = c0;
        tree.nodes[node_idx].count1 = c1;
        tree.nodes[node_idx].n_samples = static_cast<int64_t>(rows.size());

        const bool depth_ok = cfg.max_depth < 0 || depth < cfg.max_depth;
        if (!depth_ok || c0 == 0 || c1 == 0 || static_cast<int>(rows.size()) < cfg.min_samples_split)
            return node_idx;

        const BestSplit best = find_split(rows, c0, c1);
        if (!best.found) return node_idx;

        std::vector<uint32_t> left_rows, right_rows;
        for (uint32_t r : rows) {
            const double v = data.at(r, best.feature);
            const bool go_left = best.equality ? (v == best.threshold) : (v <= best.threshold);
            (go_left ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[node_idx].is_leaf = false;
        tree.nodes[node_idx].feature = best.feature;
        tree.nodes[node_idx].threshold = best.threshold;
        tree.nodes[node_idx].equality = best.equality;
        tree.nodes[node_idx].impurity_decrease = best.gain;
        const int left = build(std::move(left_rows), depth + 1);
        tree.nodes[node_idx].left = left;
        const int right = build(std::move(right_rows), depth + 1);
        tree.nodes[node_idx].right = right;
        return node_idx;
    }
};

}  // namespace

void ForestConfig::validate() const {
    if (n_trees < 1) throw std::invalid_argument("forest: n_trees must be >= 1");
    if (features_per_split < 0.0 || features_per_split > 1.0)
        throw std::invalid_argument("forest: features_per_split must be in (0, 1] or 0 for the sqrt rule");
    if (min_samples_split < 2) throw std::invalid_argument("forest: min_samples_split must be >= 2");
}

FeatureMatrix FeatureMatrix::from_encoded(const EncodedDataset& ds) {
    FeatureMatrix fm;
    fm.n = ds.n;
    fm.f = static_cast<int>(ds.features.size());
    fm.x.resize(fm.n * fm.f);
    fm.y = ds.labels;
    int cat_pos = 0, cont_pos = 0;
    std::vector<std::pair<bool, int>> src;  // (is_cat, local col)
    for (const auto& feat : ds.features) {
        fm.names.push_back(feat.name);
        const bool is_cat = feat.kind == ColumnKind::categorical;
        fm.is_categorical.push_back(is_cat ? 1 : 0);
        src.emplace_back(is_cat, is_cat ? cat_pos++ : cont_pos++);
    }
    for (size_t r = 0; r < fm.n; ++r)
        for (int j = 0; j < fm.f; ++j) {
            const auto [is_cat, local] = src[j];
            fm.x[r * fm.f + j] = is_cat ? static_cast<double>(ds.cat[r * ds.m + local])
                                        : static_cast<double>(ds.cont[r * ds.c + local]);
        }
    return fm;
}

Forest fit_forest(const FeatureMatrix& data, const ForestConfig& config) {
    config.validate();
    if (data.n == 0) throw DataError("fit_forest: empty training set");
    int64_t pos = 0;
    for (uint8_t y : data.y) pos += y;
    if (pos == 0 || pos == static_cast<int64_t>(data.n))
        throw DataError("fit_forest: single-class training set (no split signal)");

    Forest forest;
    forest.n_features = data.f;
    forest.feature_names = data.names;
    forest.is_categorical = data.is_categorical;
    forest.trees.resize(config.n_trees);

    for (int t = 0; t < config.n_trees; ++t) {
        Rng rng(mix_seed(config.seed, static_cast<uint64_t>(t)));
        std::vector<uint32_t> rows(data.n);
        if (config.bootstrap) {
            for (size_t i = 0; i < data.n; ++i) rows[i] = static_cast<uint32_t>(rng.below(data.n));
        } else {
            std::iota(rows.begin(), rows.end(), 0u);
        }
        TreeBuilder builder(data, config, rng, forest.trees[t]);
        builder.build(std::move(rows), 0);
    }
    return forest;
}

Forest fit_forest(const EncodedDataset& train, const ForestConfig& config) {
    return fit_forest(FeatureMatrix::from_encoded(train), config);
}

std::vector<double> forest_importances(const Forest& forest) {
    std::vector<double> total(forest.n_features, 0.0);
    for (const auto& tree : forest.trees) {
        std::vector<double> per_tree(forest.n_features, 0.0);
        int64_t n_root = tree.nodes.empty() ? 0 : tree.nodes[0].n_samples;
        for (const auto& node : tree.nodes)
            if (!node.is_leaf)
                per_tree[node.feature] +=
                    node.impurity_decrease * static_cast<double>(node.n_samples) / static_cast<double>(n_root);
        double sum = std::accumulate(per_tree.begin(), per_tree.end(), 0.0);
        if (sum > 0.0)
            for (int j = 0; j < forest.n_features; ++j) total[j] += per_tree[j] / sum;
    }
    const double sum = std::accumulate(total.begin(), total.end(), 0.0);
    if (sum > 0.0)
        for (double& v : total) v /= sum;
    return total;
}

ImportanceReport importance_report(const Forest& forest) {
    ImportanceReport report;
    report.names = forest.feature_names;
    report.importances = forest_importances(forest);
    return report;
}

std::vector<std::string> select(ImportanceReport& report, ThresholdMode mode, double threshold_value,
                                const std::vector<std::string>& force_include) {
    double threshold = threshold_value;
    if (mode == ThresholdMode::mean) {
        threshold = report.importances.empty()
                        ? 0.0
                        : std::accumulate(report.importances.begin(), report.importances.end(), 0.0) /
                              static_cast<double>(report.importances.size());
    }
    report.threshold = threshold;

    std::vector<size_t> order;
    for (size_t i = 0; i < report.names.size(); ++i)
        if (report.importances[i] >= threshold) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return report.importances[a] > report.importances[b];  // stable keeps schema order at ties
    });

    report.selected.clear();
    for (size_t i : order) report.selected.push_back(report.names[i]);

    report.forced_included.clear();
    for (const auto& name : force_include) {
        if (std::find(report.names.begin(), report.names.end(), name) == report.names.end())
            throw DataError("force-include feature not in schema: " + name);
        const bool already =
            std::find(report.selected.begin(), report.selected.end(), name) != report.selected.end() ||
            std::find(report.forced_included.begin(), report.forced_included.end(), name) !=
                report.forced_included.end();
        if (!already) report.forced_included.push_back(name);
    }

    std::vector<std::string> combined = report.selected;
    combined.insert(combined.end(), report.forced_included.begin(), report.forced_included.end());
    return combined;
}

nlohmann::ordered_json ImportanceReport::to_json() const {
    nlohmann::ordered_json imp = nlohmann::ordered_json::object();
    for (size_t i = 0; i < names.size(); ++i) imp[names[i]] = importances[i];
    return {{"importances", imp},
            {"threshold", threshold},
            {"selected", selected},
            {"forced_included", forced_included}};
}

ImportanceReport ImportanceReport::from_json(const nlohmann::ordered_json& j) {
    ImportanceReport report;
    for (const auto& [name, value] : j.at("importances").items()) {
        report.names.push_back(name);
        report.importances.push_back(value.get<double>());
    }
    report.threshold = j.at("threshold").get<double>();
    report.selected = j.at("selected").get<std::vector<std::string>>();
    report.forced_included = j.at("forced_included").get<std::vector<std::string>>();
    return report;
}

}  // namespace itct
