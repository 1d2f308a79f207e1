#include "itct/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace itct {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be > 0");
    if (weight_decay < 0.0) throw std::invalid_argument("train: weight_decay must be >= 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("train: betas must be in [0, 1)");
    if (eps <= 0.0) throw std::invalid_argument("train: eps must be > 0");
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (patience < 1) throw std::invalid_argument("train: patience must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("train: dropout must be in [0, 1)");
}

template <class T>
void AdamW<T>::step(const std::vector<ParamTensor<T>*>& params) {
    for (const auto* p : params)
        if (!p->grad.all_finite()) throw NumericError("non-finite gradient in tensor '" + p->name + "'");
    if (m_.empty()) {
        for (const auto* p : params) {
            m_.emplace_back(p->value.rows(), p->value.cols());
            v_.emplace_back(p->value.rows(), p->value.cols());
        }
    } else if (m_.size() != params.size()) {
        throw std::invalid_argument("AdamW: parameter list changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        ParamTensor<T>& p = *params[i];
        T* theta = p.value.data();
        const T* g = p.grad.data();
        T* m = m_[i].data();
        T* v = v_[i].data();
        for (size_t j = 0; j < p.value.size(); ++j) {
            const double gj = static_cast<double>(g[j]);
            const double mj = beta1_ * static_cast<double>(m[j]) + (1.0 - beta1_) * gj;
            const double vj = beta2_ * static_cast<double>(v[j]) + (1.0 - beta2_) * gj * gj;
            m[j] = static_cast<T>(mj);
            v[j] = static_cast<T>(vj);
            const double m_hat = mj / bc1;
            const double v_hat = vj / bc2;
            const double update = m_hat / (std::sqrt(v_hat) + eps_) + wd_ * static_cast<double>(theta[j]);
            theta[j] = static_cast<T>(static_cast<double>(theta[j]) - lr_ * update);
        }
    }
}

template class AdamW<float>;
template class AdamW<double>;

std::string History::to_csv() const {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss,val_acc,seconds\n";
    for (const auto& e : epochs) {
        out << e.epoch << "," << e.train_loss << "," << e.val_loss << "," << e.val_accuracy << "," << e.seconds
            << "\n";
    }
    return out.str();
}

nlohmann::ordered_json History::to_json() const {
    nlohmann::ordered_json j;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& e : epochs)
        rows.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"val_loss", e.val_loss},
                        {"val_acc", e.val_accuracy},
                        {"seconds", e.seconds}});
    j["epochs"] = rows;
    j["stop_reason"] = stop_reason;
    j["final_val_loss"] = final_val_loss;
    j["total_seconds"] = total_seconds;
    return j;
}

std::pair<double, double> evaluate_loss_accuracy(const ItctModel& model, const EncodedDataset& ds,
                                                 size_t batch_size) {
    double loss_sum = 0.0;
    size_t correct = 0;
    const auto plan = make_batches(ds.n, batch_size, false, 0);
    for (const auto& rows : plan) {
        const Batch batch = gather(ds, rows);
        const Mat<float> probs = model.forward_eval(batch);
        loss_sum += bce_loss(probs, batch.labels) * static_cast<double>(batch.n);
        for (size_t i = 0; i < batch.n; ++i) {
            const int pred = probs(static_cast<int>(i), 0) >= 0.5f ? 1 : 0;
            correct += pred == batch.labels[i];
        }
    }
    const double n = static_cast<double>(ds.n);
    return {loss_sum / n, static_cast<double>(correct) / n};
}

std::vector<float> predict_scores(const ItctModel& model, const EncodedDataset& ds, size_t batch_size) {
    std::vector<float> scores;
    scores.reserve(ds.n);
    const auto plan = make_batches(ds.n, batch_size, false, 0);
    for (const auto& rows : plan) {
        const Batch batch = gather(ds, rows);
        const Mat<float> probs = model.forward_eval(batch);
        for (size_t i = 0; i < batch.n; ++i) scores.push_back(probs(static_cast<int>(i), 0));
    }
    return scores;
}

namespace {

std::vector<Mat<float>> snapshot_params(ItctModel& model) {
    std::vector<Mat<float>> out;
    for (auto* p : model.params()) out.push_back(p->value);
    return out;
}

void restore_params(ItctModel& model, const std::vector<Mat<float>>& snapshot) {
    auto params = model.params();
    for (size_t i = 0; i < params.size(); ++i) params[i]->value = snapshot[i];
}

}  // namespace

History train(ItctModel& model, const EncodedDataset& train_set, const EncodedDataset& val_set,
              const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.n == 0) throw DataError("train: empty training set");

    History history;
    AdamW<float> optimizer(cfg);
    auto params = model.params();

    EarlyStopper stopper{cfg.patience};
    std::vector<Mat<float>> best_snapshot;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        EpochStats stats;
        stats.epoch = epoch;
        const double seconds = measure([&] {
            const auto plan =
                make_batches(train_set.n, cfg.batch_size, true, mix_seed(cfg.seed, 1000 + static_cast<uint64_t>(epoch)));
            double loss_sum = 0.0;
            for (size_t b = 0; b < plan.size(); ++b) {
                const Batch batch = gather(train_set, plan[b]);
                model.zero_grads();
                const Mat<float> probs =
                    model.forward(batch, true, mix_seed(cfg.seed, static_cast<uint64_t>(epoch), b));
                const double loss = bce_loss(probs, batch.labels);
                if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
                loss_sum += loss * static_cast<double>(batch.n);
                model.backward(bce_loss_backward(probs, batch.labels));
                optimizer.step(params);
            }
            stats.train_loss = loss_sum / static_cast<double>(train_set.n);
            auto [val_loss, val_acc] = evaluate_loss_accuracy(model, val_set, cfg.batch_size);
            stats.val_loss = val_loss;
            stats.val_accuracy = val_acc;
        });
        stats.seconds = seconds;
        history.epochs.push_back(stats);
        history.total_seconds += seconds;

        if (cfg.callback_enabled) {
            const double prev_best = stopper.best;
            const bool stop = stopper.observe(stats.val_loss, epoch);
            if (stats.val_loss < prev_best) best_snapshot = snapshot_params(model);
            if (stop) {
                history.stop_reason = "early_stopped";
                break;
            }
        }
    }

    if (cfg.callback_enabled && !best_snapshot.empty()) {
        restore_params(model, best_snapshot);
        history.final_val_loss = stopper.best;
    } else {
        history.final_val_loss = history.epochs.empty() ? 0.0 : history.epochs.back().val_loss;
    }
    return history;
}

FineTuneResult fine_tune(const std::string& model_path, const DatasetTable& data, const FineTuneConfig& overrides) {
    ModelBundle bundle = load_model(model_path);

    // every selected feature must exist in the incoming schema with its kind
    const auto& schema = data.schema();
    for (const auto& feat : bundle.features) {
        const int idx = schema.find(feat.name);
        if (idx < 0) throw DataError("fine-tune dataset is missing selected feature '" + feat.name + "'");
        if (schema.columns[idx].kind != feat.kind)
            throw DataError("fine-tune dataset column '" + feat.name + "' is " +
                            to_string(schema.columns[idx].kind) + ", model expects " + to_string(feat.kind));
    }

    if (overrides.epochs == 0) return {std::move(bundle), History{{}, "completed", 0.0, 0.0}};

    auto [imputed, imp_stats] = impute_missing(data);
    std::vector<std::string> selected;
    for (const auto& f : bundle.features) selected.push_back(f.name);
    const EncodedDataset encoded = encode(imputed, bundle.vocab, bundle.stats, selected);

    SplitSpec spec;
    spec.seed = overrides.seed;
    const auto splits = split(encoded, spec);

    TrainConfig cfg;
    cfg.learning_rate = overrides.learning_rate;
    cfg.epochs = overrides.epochs;
    cfg.batch_size = overrides.batch_size.value_or(265);
    cfg.callback_enabled = overrides.callback_enabled;
    cfg.patience = overrides.patience;
    cfg.seed = overrides.seed;
    cfg.dropout = bundle.model.config().dropout;

    History history = train(bundle.model, splits.train, splits.val, cfg);
    bundle.epochs_ran += static_cast<int>(history.epochs.size());
    bundle.stop_reason = history.stop_reason;
    return {std::move(bundle), std::move(history)};
}

}  // namespace itct
