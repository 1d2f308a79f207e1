#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace itct {

struct ConfusionMatrix {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double threshold = 0.5;

    int64_t total() const { return tp + fp + tn + fn; }
};

// predict attack iff score >= threshold
ConfusionMatrix confusion(const std::vector<double>& scores, const std::vector<uint8_t>& labels,
                          double threshold = 0.5);

// Attack-positive binary metrics; division by zero yields 0 with the
// degenerate flag set.
double accuracy(const ConfusionMatrix& cm);
double precision(const ConfusionMatrix& cm, bool* degenerate = nullptr);
double recall(const ConfusionMatrix& cm, bool* degenerate = nullptr);
double f1_score(const ConfusionMatrix& cm, bool* degenerate = nullptr);

// Mann-Whitney statistic with 0.5 credit for ties; equals trapezoidal ROC
// integration. Throws when only one class is present.
double auc_roc(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

struct MetricsReport {
    std::string label;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc_roc = 0.0;
    ConfusionMatrix confusion;
    bool degenerate = false;
    // normal-positive view, for transparency
    double precision_normal = 0.0;
    double recall_normal = 0.0;
    double f1_normal = 0.0;
    double training_seconds = 0.0;
    double inference_seconds = 0.0;
    int64_t total_weights = 0;
};

MetricsReport build_report(const ConfusionMatrix& cm, double auc, double training_seconds,
                           double inference_seconds, int64_t total_weights, const std::string& label);

enum class ReportFormat { markdown, csv, json };
ReportFormat report_format_from_string(const std::string& name);

// Percentages rendered with 2 decimals, ratios with 4.
std::string render(const MetricsReport& report, ReportFormat format);
std::string render_comparison(const std::vector<MetricsReport>& reports, ReportFormat format);

nlohmann::ordered_json report_to_json(const MetricsReport& report);

}  // namespace itct
