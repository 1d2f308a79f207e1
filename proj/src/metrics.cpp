#include "itct/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "itct/common.hpp"

namespace itct {

ConfusionMatrix confusion(const std::vector<double>& scores, const std::vector<uint8_t>& labels, double threshold) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("confusion: " + std::to_string(scores.size()) + " scores vs " +
                                    std::to_string(labels.size()) + " labels");
    ConfusionMatrix cm;
    cm.threshold = threshold;
    for (size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        const bool truth = labels[i] != 0;
        if (pred && truth)
            ++cm.tp;
        else if (pred && !truth)
            ++cm.fp;
        else if (!pred && truth)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const int64_t total = cm.total();
    return total == 0 ? 0.0 : static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
}

double precision(const ConfusionMatrix& cm, bool* degenerate) {
    const int64_t denom = cm.tp + cm.fp;
    if (degenerate) *degenerate = denom == 0;
    return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm, bool* degenerate) {
    const int64_t denom = cm.tp + cm.fn;
    if (degenerate) *degenerate = denom == 0;
    return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f1_score(const ConfusionMatrix& cm, bool* degenerate) {
    bool dp = false, dr = false;
    const double p = precision(cm, &dp);
    const double r = recall(cm, &dr);
    const bool deg = dp || dr || (p + r) == 0.0;
    if (degenerate) *degenerate = deg;
    return deg ? 0.0 : 2.0 * p * r / (p + r);
}

double auc_roc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc_roc: " + std::to_string(scores.size()) + " scores vs " +
                                    std::to_string(labels.size()) + " labels");
    int64_t n_pos = 0;
    for (uint8_t y : labels) n_pos += y;
    const int64_t n_neg = static_cast<int64_t>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("auc_roc: AUC undefined for single-class labels");

    std::vector<uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return scores[a] < scores[b]; });

    // rank sum of positives with average ranks over tie groups (1-based)
    double rank_sum = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (size_t k = i; k < j; ++k)
            if (labels[order[k]]) rank_sum += avg_rank;
        i = j;
    }
    const double u = rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricsReport build_report(const ConfusionMatrix& cm, double auc, double training_seconds, double inference_seconds,
                           int64_t total_weights, const std::string& label) {
    MetricsReport r;
    r.label = label;
    r.confusion = cm;
    bool dp = false, dr = false, df = false;
    r.accuracy = accuracy(cm);
    r.precision = precision(cm, &dp);
    r.recall = recall(cm, &dr);
    r.f1 = f1_score(cm, &df);
    r.auc_roc = auc;
    r.degenerate = dp || dr || df;
    // swap classes for the normal-positive view
    ConfusionMatrix flipped{cm.tn, cm.fn, cm.tp, cm.fp, cm.threshold};
    r.precision_normal = precision(flipped, &dp);
    r.recall_normal = recall(flipped, &dr);
    r.f1_normal = f1_score(flipped, &df);
    r.degenerate = r.degenerate || dp || dr || df;
    r.training_seconds = training_seconds;
    r.inference_seconds = inference_seconds;
    r.total_weights = total_weights;
    return r;
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw UsageError("unknown report format '" + name + "' (supported: markdown, csv, json)");
}

namespace {

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

struct Row {
    std::string metric;
    std::vector<std::string> values;
};

std::vector<Row> table_rows(const std::vector<MetricsReport>& reports, bool extended) {
    std::vector<Row> rows = {
        {"Accuracy(%)", {}},       {"Precision", {}},
        {"Recall", {}},            {"F1-Score", {}},
        {"AUC ROC Score", {}},     {"Training Time (seconds)", {}},
        {"Inference Time (seconds)", {}}, {"Total Model Weights", {}},
    };
    if (extended) {
        rows.push_back({"Precision (normal as positive)", {}});
        rows.push_back({"Recall (normal as positive)", {}});
        rows.push_back({"F1-Score (normal as positive)", {}});
    }
    for (const auto& r : reports) {
        size_t i = 0;
        rows[i++].values.push_back(fmt(r.accuracy * 100.0, 2));
        rows[i++].values.push_back(fmt(r.precision, 4));
        rows[i++].values.push_back(fmt(r.recall, 4));
        rows[i++].values.push_back(fmt(r.f1, 4));
        rows[i++].values.push_back(fmt(r.auc_roc, 4));
        rows[i++].values.push_back(fmt(r.training_seconds, 2));
        rows[i++].values.push_back(fmt(r.inference_seconds, 2));
        rows[i++].values.push_back(std::to_string(r.total_weights));
        if (extended) {
            rows[i++].values.push_back(fmt(r.precision_normal, 4));
            rows[i++].values.push_back(fmt(r.recall_normal, 4));
            rows[i++].values.push_back(fmt(r.f1_normal, 4));
        }
    }
    return rows;
}

std::string render_table(const std::vector<MetricsReport>& reports, ReportFormat format, bool extended) {
    const auto rows = table_rows(reports, extended);
    std::string out;
    switch (format) {
        case ReportFormat::markdown: {
            out += "| Metrics |";
            for (const auto& r : reports) out += " " + r.label + " |";
            out += "\n|---|";
            for (size_t i = 0; i < reports.size(); ++i) out += "---|";
            out += "\n";
            for (const auto& row : rows) {
                out += "| " + row.metric + " |";
                for (const auto& v : row.values) out += " " + v + " |";
                out += "\n";
            }
            break;
        }
        case ReportFormat::csv: {
            out += "metric";
            for (const auto& r : reports) out += "," + r.label;
            out += "\n";
            for (const auto& row : rows) {
                out += row.metric;
                for (const auto& v : row.values) out += "," + v;
                out += "\n";
            }
            break;
        }
        case ReportFormat::json: {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& r : reports) arr.push_back(report_to_json(r));
            out = arr.dump(2) + "\n";
            break;
        }
    }
    return out;
}

}  // namespace

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["accuracy_percent"] = std::stod(fmt(r.accuracy * 100.0, 2));
    j["precision"] = std::stod(fmt(r.precision, 4));
    j["recall"] = std::stod(fmt(r.recall, 4));
    j["f1_score"] = std::stod(fmt(r.f1, 4));
    j["auc_roc"] = std::stod(fmt(r.auc_roc, 4));
    j["training_seconds"] = std::stod(fmt(r.training_seconds, 2));
    j["inference_seconds"] = std::stod(fmt(r.inference_seconds, 2));
    j["total_weights"] = r.total_weights;
    j["confusion"] = {{"tp", r.confusion.tp},
                      {"fp", r.confusion.fp},
                      {"tn", r.confusion.tn},
                      {"fn", r.confusion.fn},
                      {"threshold", r.confusion.threshold}};
    j["degenerate"] = r.degenerate;
    j["normal_as_positive"] = {{"precision", std::stod(fmt(r.precision_normal, 4))},
                               {"recall", std::stod(fmt(r.recall_normal, 4))},
                               {"f1_score", std::stod(fmt(r.f1_normal, 4))}};
    return j;
}

std::string render(const MetricsReport& report, ReportFormat format) {
    if (format == ReportFormat::json) return report_to_json(report).dump(2) + "\n";
    return render_table({report}, format, true);
}

std::string render_comparison(const std::vector<MetricsReport>& reports, ReportFormat format) {
    return render_table(reports, format, false);
}

}  // namespace itct
