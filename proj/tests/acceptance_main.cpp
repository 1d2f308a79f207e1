// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "itct/pipeline.hpp"
#include "itct/surrogate.hpp"

using namespace itct;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail << std::endl;
    if (!pass) ++failures;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b)); }

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("itct_accept_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const { return (sub.empty() ? path : path / sub).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// criterion 1: full-model analytic gradients vs central finite differences

Batch random_batch(const ModelConfig& cfg, size_t n, uint64_t seed) {
    Rng rng(seed);
    Batch b;
    b.n = n;
    b.m = cfg.m;
    b.c = cfg.c;
    for (size_t i = 0; i < n; ++i) {
        for (int j = 0; j < cfg.m; ++j) b.cat.push_back(static_cast<int32_t>(rng.below(cfg.vocab_sizes[j])));
        for (int j = 0; j < cfg.c; ++j) b.cont.push_back(static_cast<float>(rng.uniform_range(-1.0, 1.0)));
        b.labels.push_back(rng.bernoulli(0.5));
    }
    return b;
}

void criterion_gradients() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int checked_params = 0;
    const int d_choices[] = {4, 8};
    const int n_choices[] = {1, 2};
    const int h_choices[] = {1, 2};
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(9000 + trial);
        ModelConfig cfg;
        cfg.embedding_dim = d_choices[rng.below(2)];
        cfg.n_blocks = n_choices[rng.below(2)];
        cfg.n_heads = h_choices[rng.below(2)];
        cfg.m = 1 + static_cast<int>(rng.below(3));
        cfg.c = static_cast<int>(rng.below(4));
        cfg.mlp_hidden_factors = rng.bernoulli(0.5) ? std::vector<double>{2.0, 1.0} : std::vector<double>{1.0};
        cfg.dropout = trial % 5 == 0 ? 0.2 : 0.0;  // fixed-seed masks keep FD exact
        for (int j = 0; j < cfg.m; ++j) cfg.vocab_sizes.push_back(2 + static_cast<int32_t>(rng.below(4)));

        ItctModelT<double> model(cfg, 500 + trial);
        const Batch batch = random_batch(cfg, 1 + rng.below(8), 600 + trial);
        const uint64_t seed = 700 + trial;

        model.zero_grads();
        const Mat<double> probs = model.forward(batch, true, seed);
        model.backward(bce_loss_backward(probs, batch.labels));

        const double h = 1e-5;
        for (auto* p : model.params()) {
            for (size_t i = 0; i < p->value.size(); ++i) {
                const double orig = p->value.data()[i];
                p->value.data()[i] = orig + h;
                const double up = bce_loss(model.forward(batch, true, seed), batch.labels);
                p->value.data()[i] = orig - h;
                const double down = bce_loss(model.forward(batch, true, seed), batch.labels);
                p->value.data()[i] = orig;
                const double fd = (up - down) / (2.0 * h);
                worst = std::max(worst, rel_err(p->grad.data()[i], fd));
                ++checked_params;
            }
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "gradient check, 20 configs, %d parameters, max rel err %.3g (< 1e-4), %.1fs (< 120s)",
                  checked_params, worst, seconds);
    report(1, worst < 1e-4 && seconds < 120.0, buf);
}

// ---------------------------------------------------------------------------
// criterion 2: primitive forward oracles and the pairwise AUC oracle

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

void criterion_primitive_oracles() {
    bool ok = true;
    std::string detail = "primitive oracles";

    // softmax on [ln 2, 0]
    {
        Mat<double> x(1, 2, {std::log(2.0), 0.0});
        const Mat<double> y = nn::softmax_rows(x);
        ok = ok && std::abs(y(0, 0) - 2.0 / 3.0) < 1e-9 && std::abs(y(0, 1) - 1.0 / 3.0) < 1e-9;
    }
    // layer norm on [0, 2] with gamma 2, beta 1: exact closed form with eps
    {
        Mat<double> x(1, 2, {0.0, 2.0});
        Mat<double> gamma(1, 2), beta(1, 2);
        gamma.fill(2.0);
        beta.fill(1.0);
        const double eps = 1e-6;
        const Mat<double> y = nn::layer_norm(x, gamma, beta, eps);
        const double xhat = 1.0 / std::sqrt(1.0 + eps);
        ok = ok && std::abs(y(0, 0) - (1.0 - 2.0 * xhat)) < 1e-9 && std::abs(y(0, 1) - (1.0 + 2.0 * xhat)) < 1e-9;
    }
    // 2-token, 1-head attention with identity weights against explicit arithmetic
    {
        nn::AttentionWeights<double> w("attn", 2, 1);
        w.wq.value(0, 0) = w.wq.value(1, 1) = 1.0;
        w.wk.value(0, 0) = w.wk.value(1, 1) = 1.0;
        w.wv.value(0, 0) = w.wv.value(1, 1) = 1.0;
        w.wo.value(0, 0) = w.wo.value(1, 1) = 1.0;
        Mat<double> x(2, 2, {1.0, 2.0, 3.0, 4.0});
        const Mat<double> y = nn::multi_head_attention(x, w, 2, 0.0, 0, false);
        const double s = 1.0 / std::sqrt(2.0);
        const double scores[2][2] = {{5.0 * s, 11.0 * s}, {11.0 * s, 25.0 * s}};
        for (int i = 0; i < 2 && ok; ++i) {
            const double mx = std::max(scores[i][0], scores[i][1]);
            const double e0 = std::exp(scores[i][0] - mx), e1 = std::exp(scores[i][1] - mx);
            const double a0 = e0 / (e0 + e1), a1 = e1 / (e0 + e1);
            ok = ok && std::abs(y(i, 0) - (a0 * 1.0 + a1 * 3.0)) < 1e-9 &&
                 std::abs(y(i, 1) - (a0 * 2.0 + a1 * 4.0)) < 1e-9;
        }
    }
    // AUC vs the O(n^2) oracle on 100 random instances
    {
        Rng rng(2024);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const size_t n = 10 + rng.below(491);
            std::vector<double> scores;
            std::vector<uint8_t> labels;
            bool has0 = false, has1 = false;
            for (size_t i = 0; i < n; ++i) {
                scores.push_back(rng.bernoulli(0.3) ? std::floor(rng.uniform() * 8.0) / 8.0 : rng.uniform());
                labels.push_back(rng.bernoulli(0.4));
                (labels.back() ? has1 : has0) = true;
            }
            if (!has0 || !has1) {
                labels[0] = 0;
                labels[1] = 1;
            }
            worst = std::max(worst, std::abs(auc_roc(scores, labels) - auc_bruteforce(scores, labels)));
        }
        ok = ok && worst < 1e-9;
        detail += ", AUC worst |diff| " + std::to_string(worst);
    }
    report(2, ok, detail + " (softmax/layer-norm/attention to 1e-9; AUC to 1e-9 over 100 instances)");
}

// ---------------------------------------------------------------------------
// criterion 3: overfit sanity on a separable synthetic set

EncodedDataset separable_200(uint64_t seed) {
    Rng rng(seed);
    EncodedDataset ds;
    ds.features = {{"proto", ColumnKind::categorical},
                   {"kind", ColumnKind::categorical},
                   {"x0", ColumnKind::continuous},
                   {"x1", ColumnKind::continuous}};
    ds.cat_names = {"proto", "kind"};
    ds.cont_names = {"x0", "x1"};
    ds.vocab_sizes = {4, 3};
    ds.n = 200;
    ds.m = 2;
    ds.c = 2;
    for (size_t i = 0; i < ds.n; ++i) {
        const uint8_t label = i % 2;
        ds.labels.push_back(label);
        ds.cat.push_back(label ? 1 : 2);
        ds.cat.push_back(label ? 2 : 1);
        const double shift = label ? 1.2 : -1.2;
        ds.cont.push_back(static_cast<float>(shift + 0.25 * rng.normal()));
        ds.cont.push_back(static_cast<float>(-shift + 0.25 * rng.normal()));
    }
    return ds;
}

void criterion_overfit() {
    const auto start = std::chrono::steady_clock::now();
    const EncodedDataset ds = separable_200(31337);
    ModelConfig mc;  // default architecture: d=16, N=4, H=4, factors [2,1], dropout 0.2
    mc.m = ds.m;
    mc.c = ds.c;
    mc.vocab_sizes = ds.vocab_sizes;
    ItctModel model(mc, 11);
    TrainConfig tc;  // lr 0.001, wd 0.0001, batch 265
    tc.epochs = 200;
    tc.callback_enabled = false;
    tc.seed = 12;
    train(model, ds, ds, tc);
    const auto [loss, acc] = evaluate_loss_accuracy(model, ds, 265);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "overfit sanity: train accuracy %.4f (>= 0.99), final loss %.4f (< 0.05), %.1fs (< 60s)", acc,
                  loss, seconds);
    report(3, acc >= 0.99 && loss < 0.05 && seconds < 60.0, buf);
}

// ---------------------------------------------------------------------------
// criterion 4: balancing at the full MQTT-IoT-IDS2020 per-file counts

DatasetTable counted_table(const Schema& schema, size_t n_normal, size_t n_attack) {
    DatasetTable t(schema);
    t.reserve(n_normal + n_attack);
    const int32_t tok_n = t.intern_token(0, "n");
    const int32_t tok_a = t.intern_token(0, "a");
    const double cont = 1.0;
    for (size_t i = 0; i < n_normal; ++i) t.append_row_values(&tok_n, &cont, 0);
    for (size_t i = 0; i < n_attack; ++i) t.append_row_values(&tok_a, &cont, 1);
    return t;
}

void criterion_balancing() {
    const Schema schema = Schema::parse("proto,categorical\nv,continuous\nis_attack,label\n");
    std::vector<DatasetTable> tables;
    tables.push_back(counted_table(schema, 70768, 40624));
    tables.push_back(counted_table(schema, 210819, 22436));
    tables.push_back(counted_table(schema, 947177, 19728963));
    tables.push_back(counted_table(schema, 32164, 10013152));
    tables.push_back(counted_table(schema, 1056230, 0));
    const auto out = balance_files(tables, 77);
    const size_t expected[5] = {40624, 22436, 947177, 32164, 1056230};
    bool ok = true;
    std::string detail = "balanced pairs";
    for (size_t i = 0; i < 5; ++i) {
        const auto [n0, n1] = out[i].class_counts();
        ok = ok && n0 == expected[i] && n1 == expected[i];
        detail += " " + std::to_string(n1) + "/" + std::to_string(n0);
    }
    report(4, ok, detail + " (expected 40624, 22436, 947177, 32164, 1056230; exact)");
}

// ---------------------------------------------------------------------------
// criterion 5: AdamW closed forms

void criterion_adamw() {
    bool ok = true;
    // first step on a scalar
    {
        TrainConfig cfg;
        cfg.weight_decay = 0.0;
        AdamW<double> opt(cfg);
        ParamTensor<double> p("theta", 1, 1);
        p.value(0, 0) = 1.0;
        p.grad(0, 0) = 1.0;
        std::vector<ParamTensor<double>*> params = {&p};
        opt.step(params);
        const double expected = 1.0 - cfg.learning_rate / (1.0 + cfg.eps);
        ok = ok && std::abs(p.value(0, 0) - expected) < 1e-12;
    }
    // pure decay over 1000 steps
    {
        TrainConfig cfg;
        AdamW<double> opt(cfg);
        ParamTensor<double> p("theta", 1, 1);
        p.value(0, 0) = 1.0;
        std::vector<ParamTensor<double>*> params = {&p};
        double worst = 0.0;
        for (int t = 1; t <= 1000; ++t) {
            p.zero_grad();
            opt.step(params);
            worst = std::max(worst,
                             std::abs(p.value(0, 0) - std::pow(1.0 - cfg.learning_rate * cfg.weight_decay, t)));
        }
        ok = ok && worst < 1e-9;
    }
    report(5, ok, "AdamW first-step closed form to 1e-12 and geometric decay over 1000 steps to 1e-9");
}

// ---------------------------------------------------------------------------
// criteria 6 and 7: full pipeline determinism and the desk-scale run

PipelineConfig surrogate_config(const std::string& data_dir, const std::string& out_dir, uint64_t seed) {
    PipelineConfig cfg;
    const auto& stems = surrogate_file_stems();
    for (size_t i = 0; i < 5; ++i) cfg.dataset_paths[i] = data_dir + "/" + stems[i] + ".csv";
    cfg.schema_path = data_dir + "/schema.txt";
    cfg.output_dir = out_dir;
    cfg.seed = seed;
    return cfg;
}

nlohmann::ordered_json strip_timing(nlohmann::ordered_json j) {
    j.erase("training_seconds");
    j.erase("inference_seconds");
    return j;
}

void criterion_determinism() {
    TempDir dir("det");
    SurrogateSpec spec;
    spec.seed = 5150;
    spec.scale = 0.05;
    write_surrogate_csvs(spec, dir.str("data"));

    auto run = [&](const std::string& out) {
        PipelineConfig cfg = surrogate_config(dir.str("data"), dir.str(out), 616);
        cfg.epochs = 2;
        cfg.batch_size = 64;
        cfg.forest_trees = 15;
        cfg.feature_selection = true;
        cfg.callback = true;
        cmd_preprocess(cfg);
        cmd_select_features(cfg);
        cmd_train(cfg);
        cmd_evaluate(cfg, cfg.model_path(), "det");
        return cfg;
    };
    const PipelineConfig a = run("out_a");
    const PipelineConfig b = run("out_b");

    const bool cache_same = slurp(a.cache_bin_path()) == slurp(b.cache_bin_path());
    const bool model_same = slurp(a.model_path()) == slurp(b.model_path());
    const auto ra = nlohmann::ordered_json::parse(slurp(dir.str("out_a/report.json")));
    const auto rb = nlohmann::ordered_json::parse(slurp(dir.str("out_b/report.json")));
    const bool report_same = strip_timing(ra).dump() == strip_timing(rb).dump();
    report(6, cache_same && model_same && report_same,
           std::string("determinism: cache ") + (cache_same ? "identical" : "DIFFERS") + ", model file " +
               (model_same ? "byte-identical" : "DIFFERS") + ", report (timing excluded) " +
               (report_same ? "identical" : "DIFFERS"));
}

void criterion_desk_scale(std::vector<int64_t>& out_weights) {
    const auto start = std::chrono::steady_clock::now();
    TempDir dir("desk");
    // synthetic surrogate stands in for the unavailable source captures
    SurrogateSpec spec;
    spec.seed = 20260809;
    spec.scale = 1.0;
    write_surrogate_csvs(spec, dir.str("data"));

    PipelineConfig cfg = surrogate_config(dir.str("data"), dir.str("out"), 90210);
    cmd_preprocess(cfg);
    const auto reports = cmd_experiment_matrix(cfg);

    const MetricsReport& exp2 = reports[1];
    const MetricsReport& exp3 = reports[2];
    const auto h3 = nlohmann::ordered_json::parse(slurp(dir.str("out/history_exp3.json")));
    const bool exp3_stopped = h3.at("stop_reason").get<std::string>() == "early_stopped";
    const bool time_ok = !exp3_stopped || exp3.training_seconds < exp2.training_seconds;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& r : reports) out_weights.push_back(r.total_weights);
    for (const char* stem : {"model_exp1.itct", "model_exp2.itct", "model_exp3.itct"}) {
        const ModelBundle bundle = load_model(dir.str("out/") + stem);
        int64_t sum = 0;
        for (const auto& [name, count] : bundle.model.param_breakdown()) sum += count;
        if (sum != bundle.model.count_params()) out_weights.push_back(-1);  // flags criterion 9
    }

    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "desk-scale surrogate run: exp2 accuracy %.4f (>= 0.75), exp2 AUC %.4f (>= 0.75), exp3 %s "
                  "(train %.1fs vs exp2 %.1fs), total %.0fs (< 1800s)",
                  exp2.accuracy, exp2.auc_roc, exp3_stopped ? "early-stopped" : "ran all epochs",
                  exp3.training_seconds, exp2.training_seconds, seconds);
    report(7, exp2.accuracy >= 0.75 && exp2.auc_roc >= 0.75 && time_ok && seconds < 1800.0, buf);
}

// ---------------------------------------------------------------------------
// criterion 8: serialization round-trips and corruption detection

void criterion_serialization() {
    TempDir dir("ser");
    bool ok = true;
    Rng rng(414);
    for (int trial = 0; trial < 10 && ok; ++trial) {
        ModelConfig cfg;
        cfg.embedding_dim = rng.bernoulli(0.5) ? 4 : 8;
        cfg.n_heads = rng.bernoulli(0.5) ? 1 : 2;
        cfg.n_blocks = 1 + static_cast<int>(rng.below(2));
        cfg.m = 1 + static_cast<int>(rng.below(3));
        cfg.c = static_cast<int>(rng.below(3));
        cfg.mlp_hidden_factors = {2.0, 1.0};
        cfg.dropout = 0.2;
        for (int j = 0; j < cfg.m; ++j) cfg.vocab_sizes.push_back(2 + static_cast<int32_t>(rng.below(5)));

        ModelBundle bundle;
        bundle.model = ItctModel(cfg, 880 + trial);
        for (int j = 0; j < cfg.m; ++j) {
            bundle.vocab.add_column("cat" + std::to_string(j));
            for (int32_t t = 1; t < cfg.vocab_sizes[j]; ++t)
                bundle.vocab.add_token(j, "tok" + std::to_string(t));
            bundle.features.push_back({"cat" + std::to_string(j), ColumnKind::categorical});
        }
        for (int j = 0; j < cfg.c; ++j) {
            bundle.stats.names.push_back("num" + std::to_string(j));
            bundle.stats.means.push_back(rng.normal());
            bundle.stats.stds.push_back(1.0 + rng.uniform());
            bundle.features.push_back({"num" + std::to_string(j), ColumnKind::continuous});
        }

        const std::string path = dir.str("m" + std::to_string(trial) + ".itct");
        save_model(bundle, path);
        const ModelBundle loaded = load_model(path);
        const Batch batch = random_batch(cfg, 6, 990 + trial);
        ok = ok && bundle.model.forward_eval(batch) == loaded.model.forward_eval(batch);

        // flip a byte in the blob; the checksum must catch it
        std::string bytes = slurp(path);
        bytes[bytes.size() - 3] ^= 0x11;
        std::ofstream(path, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        bool caught = false;
        try {
            load_model(path);
        } catch (const DataError& e) {
            caught = std::string(e.what()).find("checksum") != std::string::npos;
        }
        ok = ok && caught;
    }
    report(8, ok, "save/load bit-identical forward on 10 random models; corrupted bytes rejected by checksum");
}

// ---------------------------------------------------------------------------
// criterion 9: parameter counting closed forms

int64_t closed_form(const ModelConfig& cfg) {
    const int64_t d = cfg.embedding_dim;
    int64_t total = 0;
    for (int32_t v : cfg.vocab_sizes) total += static_cast<int64_t>(v) * (d - 1);
    total += cfg.m;                                        // column identifiers
    total += cfg.n_blocks * (4 * d * d + 2 * d + (d * d + d) + 2 * d);
    if (cfg.c > 0) total += 2 * cfg.c;                     // continuous layer norm
    int64_t in = d * cfg.m + cfg.c;
    for (double f : cfg.mlp_hidden_factors) {
        const int64_t out = static_cast<int64_t>(std::floor(f * static_cast<double>(d * cfg.m + cfg.c)));
        total += in * out + out;
        in = out;
    }
    total += in + 1;  // final unit
    return total;
}

void criterion_param_count(const std::vector<int64_t>& desk_weights) {
    struct Toy {
        int d, N, H, m, c;
        std::vector<int32_t> vocabs;
        std::vector<double> factors;
    };
    const Toy toys[5] = {
        {2, 1, 1, 1, 0, {2}, {1.0}},
        {4, 1, 2, 2, 2, {3, 4}, {2.0, 1.0}},
        {8, 2, 2, 3, 1, {5, 2, 7}, {1.0}},
        {16, 4, 4, 3, 3, {3, 2, 16}, {2.0, 1.0}},
        {6, 3, 3, 2, 4, {9, 4}, {3.0, 2.0, 1.0}},
    };
    bool ok = true;
    for (const auto& toy : toys) {
        ModelConfig cfg;
        cfg.embedding_dim = toy.d;
        cfg.n_blocks = toy.N;
        cfg.n_heads = toy.H;
        cfg.m = toy.m;
        cfg.c = toy.c;
        cfg.vocab_sizes = toy.vocabs;
        cfg.mlp_hidden_factors = toy.factors;
        cfg.dropout = 0.0;
        ItctModel model(cfg, 0);
        ok = ok && model.count_params() == closed_form(cfg);
        int64_t sum = 0;
        for (const auto& [name, count] : model.param_breakdown()) sum += count;
        ok = ok && sum == model.count_params();
    }
    // desk-scale breakdowns already verified; -1 flags a mismatch
    bool desk_ok = !desk_weights.empty();
    for (int64_t w : desk_weights) desk_ok = desk_ok && w > 0;
    report(9, ok && desk_ok,
           "count_params equals the closed form on 5 configurations; per-tensor breakdowns sum to totals, "
           "including each desk-scale experiment model");
}

}  // namespace

int main() {
    std::cout << "ITCT acceptance suite\n";
    std::vector<int64_t> desk_weights;
    try {
        criterion_gradients();
    } catch (const std::exception& e) {
        report(1, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_primitive_oracles();
    } catch (const std::exception& e) {
        report(2, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_overfit();
    } catch (const std::exception& e) {
        report(3, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_balancing();
    } catch (const std::exception& e) {
        report(4, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_adamw();
    } catch (const std::exception& e) {
        report(5, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_determinism();
    } catch (const std::exception& e) {
        report(6, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_desk_scale(desk_weights);
    } catch (const std::exception& e) {
        report(7, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_serialization();
    } catch (const std::exception& e) {
        report(8, false, std::string("exception: ") + e.what());
    }
    try {
        criterion_param_count(desk_weights);
    } catch (const std::exception& e) {
        report(9, false, std::string("exception: ") + e.what());
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
