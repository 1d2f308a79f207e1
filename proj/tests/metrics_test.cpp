#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "doctest.h"
#include "itct/common.hpp"
#include "itct/metrics.hpp"

using namespace itct;

namespace {

// O(n^2) pairwise oracle: (concordant + 0.5 * ties) / (n_pos * n_neg)
double auc_bruteforce(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    double credit = 0.0;
    int64_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j])
                credit += 1.0;
            else if (scores[i] == scores[j])
                credit += 0.5;
        }
    }
    return credit / static_cast<double>(pairs);
}

}  // namespace

TEST_SUITE("metrics.confusion") {
    TEST_CASE("perfect scores produce no errors") {
        const std::vector<double> scores = {0.0, 1.0, 1.0, 0.0};
        const std::vector<uint8_t> labels = {0, 1, 1, 0};
        const ConfusionMatrix cm = confusion(scores, labels, 0.5);
        CHECK(cm.fp == 0);
        CHECK(cm.fn == 0);
        CHECK(cm.tp == 2);
        CHECK(cm.tn == 2);
    }

    TEST_CASE("scores below the threshold on positive labels are all false negatives") {
        const std::vector<double> scores(6, 0.4);
        const std::vector<uint8_t> labels(6, 1);
        const ConfusionMatrix cm = confusion(scores, labels, 0.5);
        CHECK(cm.fn == 6);
        CHECK(cm.tp == 0);
    }

    TEST_CASE("four-way tally on a mixed example") {
        const std::vector<double> scores = {0.9, 0.4, 0.6, 0.1};
        const std::vector<uint8_t> labels = {1, 1, 0, 0};
        const ConfusionMatrix cm = confusion(scores, labels, 0.5);
        CHECK(cm.tp == 1);
        CHECK(cm.fn == 1);
        CHECK(cm.fp == 1);
        CHECK(cm.tn == 1);
    }

    TEST_CASE("prediction at exactly the threshold counts as positive") {
        const ConfusionMatrix cm = confusion({0.5}, {1}, 0.5);
        CHECK(cm.tp == 1);
    }

    TEST_CASE("length mismatch is rejected") {
        CHECK_THROWS_AS(confusion({0.5}, {1, 0}, 0.5), std::invalid_argument);
    }

    TEST_CASE("raising the threshold never increases tp or fp") {
        Rng rng(1);
        std::vector<double> scores;
        std::vector<uint8_t> labels;
        for (int i = 0; i < 300; ++i) {
            scores.push_back(rng.uniform());
            labels.push_back(rng.bernoulli(0.4));
        }
        int64_t prev_tp = std::numeric_limits<int64_t>::max();
        int64_t prev_fp = std::numeric_limits<int64_t>::max();
        for (double thr = 0.0; thr <= 1.0; thr += 0.1) {
            const ConfusionMatrix cm = confusion(scores, labels, thr);
            CHECK(cm.tp <= prev_tp);
            CHECK(cm.fp <= prev_fp);
            CHECK(cm.total() == 300);
            prev_tp = cm.tp;
            prev_fp = cm.fp;
        }
    }
}

TEST_SUITE("metrics.ratios") {
    TEST_CASE("a perfect confusion matrix scores one everywhere") {
        const ConfusionMatrix cm{10, 0, 10, 0, 0.5};
        CHECK(accuracy(cm) == 1.0);
        CHECK(precision(cm) == 1.0);
        CHECK(recall(cm) == 1.0);
        CHECK(f1_score(cm) == 1.0);
    }

    TEST_CASE("f1 is the harmonic mean and rounds consistently") {
        // precision 0.87 and recall 0.82 give f1 = 0.8443, reported as 0.84
        const double p = 0.87, r = 0.82;
        const double f1 = 2.0 * p * r / (p + r);
        CHECK(f1 == doctest::Approx(0.8443).epsilon(1e-3));
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%.2f", f1);
        CHECK(std::string(buf) == "0.84");
    }

    TEST_CASE("zero positive predictions flag a degenerate precision of zero") {
        const ConfusionMatrix cm{0, 0, 5, 5, 0.5};
        bool degenerate = false;
        CHECK(precision(cm, &degenerate) == 0.0);
        CHECK(degenerate);
    }

    TEST_CASE("accuracy is (tp+tn)/total exactly") {
        const ConfusionMatrix cm{3, 2, 4, 1, 0.5};
        CHECK(accuracy(cm) == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_SUITE("metrics.auc") {
    TEST_CASE("perfect separation scores one") {
        CHECK(auc_roc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    }

    TEST_CASE("identical scores give one half by the tie rule") {
        CHECK(auc_roc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == doctest::Approx(0.5));
    }

    TEST_CASE("single-class labels are rejected") {
        CHECK_THROWS_AS(auc_roc({0.1, 0.9}, {1, 1}), DataError);
    }

    TEST_CASE("matches the pairwise oracle on random instances, ties included") {
        Rng rng(7);
        for (int trial = 0; trial < 30; ++trial) {
            const size_t n = 20 + rng.below(480);
            std::vector<double> scores;
            std::vector<uint8_t> labels;
            bool has0 = false, has1 = false;
            for (size_t i = 0; i < n; ++i) {
                // quantized scores force plenty of ties
                scores.push_back(std::floor(rng.uniform() * 20.0) / 20.0);
                labels.push_back(rng.bernoulli(0.35));
                (labels.back() ? has1 : has0) = true;
            }
            if (!has0 || !has1) continue;
            CHECK(std::abs(auc_roc(scores, labels) - auc_bruteforce(scores, labels)) < 1e-9);
        }
    }

    TEST_CASE("invariant under strictly increasing transforms") {
        Rng rng(8);
        std::vector<double> scores;
        std::vector<uint8_t> labels;
        for (int i = 0; i < 200; ++i) {
            scores.push_back(rng.uniform_range(-2.0, 2.0));
            labels.push_back(rng.bernoulli(0.5));
        }
        std::vector<double> cubed;
        for (double s : scores) cubed.push_back(s * s * s);
        CHECK(auc_roc(scores, labels) == doctest::Approx(auc_roc(cubed, labels)).epsilon(1e-12));
    }

    TEST_CASE("flipping labels complements the AUC on tie-free scores") {
        Rng rng(9);
        std::vector<double> scores;
        std::vector<uint8_t> labels;
        for (int i = 0; i < 101; ++i) {
            scores.push_back(static_cast<double>(i) + rng.uniform() * 0.5);  // all distinct
            labels.push_back(rng.bernoulli(0.5));
        }
        std::vector<uint8_t> flipped;
        for (uint8_t y : labels) flipped.push_back(1 - y);
        CHECK(auc_roc(scores, labels) == doctest::Approx(1.0 - auc_roc(scores, flipped)).epsilon(1e-12));
    }
}

TEST_SUITE("metrics.render") {
    MetricsReport reference_report() {
        // Experiment-2 reference values
        MetricsReport r;
        r.label = "Experiment 2 (w/o FE & w/o Callback)";
        r.accuracy = 0.82;
        r.precision = 0.87;
        r.recall = 0.82;
        r.f1 = 0.84;
        r.auc_roc = 0.8174;
        r.training_seconds = 1226.46;
        r.inference_seconds = 2.56;
        r.total_weights = 26209;
        return r;
    }

    TEST_CASE("reference row renders with pinned precision") {
        const std::string md = render(reference_report(), ReportFormat::markdown);
        CHECK(md.find("| Accuracy(%) | 82.00 |") != std::string::npos);
        CHECK(md.find("| Precision | 0.8700 |") != std::string::npos);
        CHECK(md.find("| Recall | 0.8200 |") != std::string::npos);
        CHECK(md.find("| F1-Score | 0.8400 |") != std::string::npos);
        CHECK(md.find("| AUC ROC Score | 0.8174 |") != std::string::npos);
        CHECK(md.find("| Training Time (seconds) | 1226.46 |") != std::string::npos);
        CHECK(md.find("| Total Model Weights | 26209 |") != std::string::npos);
    }

    TEST_CASE("unknown formats list the supported ones") {
        CHECK_THROWS_WITH_AS(report_format_from_string(""), doctest::Contains("markdown"), UsageError);
        CHECK_THROWS_WITH_AS(report_format_from_string("pdf"), doctest::Contains("csv"), UsageError);
    }

    TEST_CASE("markdown and csv carry identical numeric values") {
        const MetricsReport r = reference_report();
        const std::string md = render(r, ReportFormat::markdown);
        const std::string csv = render(r, ReportFormat::csv);
        for (const std::string value : {"82.00", "0.8700", "0.8200", "0.8400", "0.8174", "1226.46", "2.56", "26209"}) {
            CHECK(md.find(value) != std::string::npos);
            CHECK(csv.find(value) != std::string::npos);
        }
    }

    TEST_CASE("comparison table keeps one column per experiment") {
        MetricsReport a = reference_report();
        MetricsReport b = reference_report();
        b.label = "Experiment 3 (w/o FE & w/Callback)";
        b.accuracy = 0.8163;
        const std::string md = render_comparison({a, b}, ReportFormat::markdown);
        CHECK(md.find("Experiment 2") != std::string::npos);
        CHECK(md.find("Experiment 3") != std::string::npos);
        CHECK(md.find("81.63") != std::string::npos);
    }

    TEST_CASE("build_report computes consistent ratios from the matrix") {
        const ConfusionMatrix cm{41, 6, 39, 14, 0.5};
        const MetricsReport r = build_report(cm, 0.9, 10.0, 0.5, 1234, "x");
        CHECK(r.accuracy == doctest::Approx(0.8));
        CHECK(r.precision == doctest::Approx(41.0 / 47.0));
        CHECK(r.recall == doctest::Approx(41.0 / 55.0));
        const double hm = 2.0 * r.precision * r.recall / (r.precision + r.recall);
        CHECK(r.f1 == doctest::Approx(hm).epsilon(1e-12));
        CHECK(r.total_weights == 1234);
        CHECK(!r.degenerate);
    }
}
