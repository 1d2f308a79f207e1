#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "itct/pipeline.hpp"
#include "itct/surrogate.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    double fraction = -1.0;
    int64_t seed = -1;
    std::string output_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value configuration file");
    cmd->add_option("--fraction", opts.fraction, "stratified subsample fraction of the cache (0, 1]");
    cmd->add_option("--seed", opts.seed, "seed override");
    cmd->add_option("--out-dir", opts.output_dir, "output directory override");
}

itct::PipelineConfig resolve(const CommonOpts& opts) {
    itct::PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = itct::PipelineConfig::load_file(opts.config_path);
    if (opts.fraction >= 0.0) cfg.fraction = opts.fraction;
    if (opts.seed >= 0) cfg.seed = static_cast<uint64_t>(opts.seed);
    if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ITCT: transformer-based IoT traffic classifier"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string model_path, input_path, output_path;
    double ft_lr = 0.0001;
    int ft_epochs = 10;
    bool introspect = false;

    auto* preprocess = app.add_subcommand("preprocess", "load, impute, balance, split and encode the five CSVs");
    add_common(preprocess, opts);

    auto* sel = app.add_subcommand("select-features", "rank features with a tree ensemble and write importances");
    add_common(sel, opts);

    auto* tr = app.add_subcommand("train", "train a model on the preprocessed cache");
    add_common(tr, opts);

    auto* ev = app.add_subcommand("evaluate", "evaluate a saved model on the cached test split");
    add_common(ev, opts);
    ev->add_option("--model", model_path, "model file")->required();
    ev->add_flag("--introspect", introspect, "dump per-stage tensor shapes and norms");

    auto* mx = app.add_subcommand("experiment-matrix", "run the three toggle configurations side by side");
    add_common(mx, opts);

    auto* pr = app.add_subcommand("predict", "score a CSV of feature rows with a saved model");
    add_common(pr, opts);
    pr->add_option("--model", model_path, "model file")->required();
    pr->add_option("--input", input_path, "input CSV")->required();
    pr->add_option("--output", output_path, "output CSV (default <out-dir>/predictions.csv)");

    auto* ft = app.add_subcommand("fine-tune", "continue training a saved model on a small labeled CSV");
    add_common(ft, opts);
    ft->add_option("--model", model_path, "pre-trained model file")->required();
    ft->add_option("--input", input_path, "labeled CSV with the model's feature columns")->required();
    ft->add_option("--learning-rate", ft_lr, "fine-tuning learning rate");
    ft->add_option("--epochs", ft_epochs, "fine-tuning epochs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        const itct::PipelineConfig cfg = resolve(opts);
        if (preprocess->parsed()) {
            const auto outcome = itct::cmd_preprocess(cfg);
            std::cout << outcome.summary.dump(2) << "\n";
        } else if (sel->parsed()) {
            const auto report = itct::cmd_select_features(cfg);
            std::cout << report.to_json().dump(2) << "\n";
        } else if (tr->parsed()) {
            const auto outcome = itct::cmd_train(cfg);
            std::cout << "model: " << outcome.model_path << "\n"
                      << "weights: " << outcome.total_weights << "\n"
                      << "epochs: " << outcome.history.epochs.size() << " (" << outcome.history.stop_reason << ")\n"
                      << "final validation loss: " << outcome.history.final_val_loss << "\n";
        } else if (ev->parsed()) {
            const auto report = itct::cmd_evaluate(cfg, model_path, "", introspect);
            std::cout << itct::render(report, itct::ReportFormat::markdown);
        } else if (mx->parsed()) {
            const auto reports = itct::cmd_experiment_matrix(cfg);
            std::cout << itct::render_comparison(reports, itct::ReportFormat::markdown);
        } else if (pr->parsed()) {
            const std::string out =
                output_path.empty() ? cfg.output_dir + "/predictions.csv" : output_path;
            const size_t rows = itct::cmd_predict(cfg, model_path, input_path, out);
            std::cout << "wrote " << rows << " prediction(s) to " << out << "\n";
        } else if (ft->parsed()) {
            const auto outcome = itct::cmd_fine_tune(cfg, model_path, input_path, ft_lr, ft_epochs);
            std::cout << "model: " << outcome.model_path << "\n"
                      << "epochs: " << outcome.history.epochs.size() << "\n";
        }
    } catch (const itct::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const itct::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const itct::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
