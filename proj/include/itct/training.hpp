#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itct/dataset.hpp"
#include "itct/model.hpp"
#include "json.hpp"

namespace itct {

struct TrainConfig {
    double learning_rate = 0.001;
    double weight_decay = 0.0001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-7;
    size_t batch_size = 265;
    int epochs = 20;
    double dropout = 0.2;
    bool callback_enabled = false;
    int patience = 3;
    uint64_t seed = 0;

    void validate() const;
};

// Decoupled weight decay: theta -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta)
template <class T>
class AdamW {
  public:
    explicit AdamW(const TrainConfig& cfg)
        : lr_(cfg.learning_rate), wd_(cfg.weight_decay), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.eps) {}

    // Consumes and applies the ParamTensors' accumulated grads. A non-finite
    // gradient aborts the step before any state is touched.
    void step(const std::vector<ParamTensor<T>*>& params);
    int64_t steps_taken() const { return t_; }

  private:
    double lr_, wd_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::vector<Mat<T>> m_, v_;
};

// Validation-loss patience counter; improvement means strictly lower loss.
struct EarlyStopper {
    int patience = 3;
    double best = std::numeric_limits<double>::infinity();
    int best_epoch = 0;  // 1-based epoch of the best observation
    int bad_epochs = 0;

    // Returns true when training should stop after this observation.
    bool observe(double val_loss, int epoch) {
        if (val_loss < best) {
            best = val_loss;
            best_epoch = epoch;
            bad_epochs = 0;
            return false;
        }
        return ++bad_epochs >= patience;
    }
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double seconds = 0.0;
};

struct History {
    std::vector<EpochStats> epochs;
    std::string stop_reason = "completed";  // or "early_stopped"
    double final_val_loss = 0.0;
    double total_seconds = 0.0;

    std::string to_csv() const;
    nlohmann::ordered_json to_json() const;
};

History train(ItctModel& model, const EncodedDataset& train_set, const EncodedDataset& val_set,
              const TrainConfig& cfg);

// Mean loss and accuracy at threshold 0.5 over a dataset, eval mode.
std::pair<double, double> evaluate_loss_accuracy(const ItctModel& model, const EncodedDataset& ds,
                                                 size_t batch_size);

std::vector<float> predict_scores(const ItctModel& model, const EncodedDataset& ds, size_t batch_size);

struct FineTuneConfig {
    double learning_rate = 0.0001;
    int epochs = 10;
    std::optional<size_t> batch_size;  // defaults to the saved model's era value, 265
    bool callback_enabled = false;
    int patience = 3;
    uint64_t seed = 0;
};

struct FineTuneResult {
    ModelBundle bundle;
    History history;
};

// Continues supervised training of a saved model on a small labeled table.
FineTuneResult fine_tune(const std::string& model_path, const DatasetTable& data, const FineTuneConfig& overrides);

// ---------------------------------------------------------------------------
// wall-clock measurement

template <class R>
struct Timed {
    R result;
    double seconds;
};

template <class F>
auto measure(F&& f) {
    using R = decltype(f());
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<R>) {
        f();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        return dt.count();
    } else {
        R result = f();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        return Timed<R>{std::move(result), dt.count()};
    }
}

}  // namespace itct
