#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "riskcal/experiment.hpp"
#include "riskcal/serialize.hpp"

namespace {

using namespace riskcal;

struct GenDataArgs {
    std::string scenario = "default-overlap";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_data(const GenDataArgs& args) {
    const Dataset dataset = build_dataset(DatasetSource{args.scenario, "", "", ""},
                                          args.seed);
    std::filesystem::create_directories(args.out);
    const auto dir = std::filesystem::path(args.out);
    save_csv(dataset, (dir / "dataset.csv").string());
    save_taxonomy_file(dataset.taxonomy, (dir / "taxonomy.csv").string());
    std::cout << "wrote " << (dir / "dataset.csv").string() << " ("
              << dataset.num_samples() << " samples) and "
              << (dir / "taxonomy.csv").string() << "\n";
    return 0;
}

struct TrainArgs {
    std::string data;
    std::string taxonomy;
    std::string preset;
    std::string loss;
    std::string arch = "linear";
    int hidden_dim = 16;
    int epochs = 0;
    std::uint64_t seed = 0;
    double learning_rate = 1e-4;
    int batch_size = 32;
    double weight_decay = 0.01;
    std::string schedule = "cosine";
    std::string out;
    std::string report;
};

int cmd_train(const TrainArgs& args) {
    const ClassTaxonomy taxonomy = !args.preset.empty()
                                       ? taxonomy_preset(args.preset)
                                       : load_taxonomy_file(args.taxonomy);
    Dataset dataset = load_csv(args.data, taxonomy);
    dataset = stratified_split(std::move(dataset), {0.70, 0.15, 0.15}, args.seed);

    const LossConfig loss_config = load_loss_config_file(args.loss);

    ModelConfig model_config;
    model_config.architecture = architecture_from_string(args.arch);
    model_config.hidden_dim = args.hidden_dim;

    TrainConfig config;
    config.learning_rate = args.learning_rate;
    config.batch_size = args.batch_size;
    config.epochs = args.epochs;
    config.weight_decay = args.weight_decay;
    config.schedule = schedule_from_string(args.schedule);
    config.seed = args.seed;
    config.loss =
        resolve_loss(loss_config, taxonomy, dataset.class_counts(dataset.split.train));

    const auto [model, history] = train(dataset, model_config, config);
    write_json_file(args.out, model_to_json(model, config, loss_config));

    const TaxonomyReport test_report = taxonomy_report(
        confusion_on_split(model, dataset, dataset.split.test), taxonomy);
    nlohmann::json history_json = nlohmann::json::array();
    for (const auto& record : history.epochs) {
        history_json.push_back(epoch_record_to_json(record));
    }
    write_json_file(args.report, nlohmann::json{{"test", report_to_json(test_report)},
                                                {"history", history_json}});

    std::cout << "trained " << args.arch << " for " << args.epochs
              << " epochs; test accuracy " << test_report.accuracy << ", CER "
              << test_report.cer << "%\n";
    return 0;
}

struct CompareArgs {
    std::string spec;
    std::string out;
    std::string table;
};

int cmd_compare(const CompareArgs& args) {
    const ExperimentSpec spec = load_experiment_spec_file(args.spec);
    const ComparisonResult result = run_comparison(spec);
    write_json_file(args.out, comparison_to_json(result));
    if (!args.table.empty()) write_text_file(args.table, render_table_csv(result));
    std::cout << render_table_csv(result);
    return 0;
}

struct AblateArgs {
    std::string spec;
    std::string out;
};

int cmd_ablate(const AblateArgs& args) {
    const ExperimentSpec spec = load_experiment_spec_file(args.spec);
    const ComparisonResult result = run_ablation(spec);
    write_json_file(args.out, comparison_to_json(result));
    std::cout << render_table_csv(result);
    return 0;
}

struct TradeoffArgs {
    std::string results;
    std::string out;
};

int cmd_tradeoff(const TradeoffArgs& args) {
    const ComparisonResult result = comparison_from_json(load_json_file(args.results));
    write_text_file(args.out, render_tradeoff_csv(result));
    std::cout << "wrote " << args.out << " (" << result.aggregates.size()
              << " points)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-calibrated classification trainer and evaluator"};
    app.require_subcommand(1);

    GenDataArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "Write a synthetic fixture as CSV");
    gen->add_option("--scenario", gen_args.scenario, "Scenario name")
        ->default_val("default-overlap");
    gen->add_option("--seed", gen_args.seed, "Generator seed")->required();
    gen->add_option("--out", gen_args.out,
                    "Output directory for dataset.csv and taxonomy.csv")
        ->required();

    TrainArgs train_args;
    auto* tr = app.add_subcommand("train", "Train a classifier on a dataset CSV");
    tr->add_option("--data", train_args.data, "Dataset CSV path")->required();
    auto* tax_opt = tr->add_option("--taxonomy", train_args.taxonomy,
                                   "Taxonomy CSV path");
    auto* preset_opt =
        tr->add_option("--preset", train_args.preset,
                       "Built-in taxonomy (brainmri, isic2018, breakhis, sicapv2)");
    tax_opt->excludes(preset_opt);
    tr->add_option("--loss", train_args.loss, "Loss spec JSON path")->required();
    tr->add_option("--epochs", train_args.epochs, "Training epochs")->required();
    tr->add_option("--seed", train_args.seed, "Run seed")->required();
    tr->add_option("--arch", train_args.arch, "linear or mlp1")->default_val("linear");
    tr->add_option("--hidden-dim", train_args.hidden_dim, "Hidden width (mlp1)")
        ->default_val(16);
    tr->add_option("--lr", train_args.learning_rate, "Learning rate")
        ->default_val(1e-4);
    tr->add_option("--batch-size", train_args.batch_size, "Batch size")
        ->default_val(32);
    tr->add_option("--weight-decay", train_args.weight_decay, "AdamW weight decay")
        ->default_val(0.01);
    tr->add_option("--schedule", train_args.schedule, "constant or cosine")
        ->default_val("cosine");
    tr->add_option("--out", train_args.out, "Model JSON output path")->required();
    tr->add_option("--report", train_args.report, "Report JSON output path")
        ->required();

    CompareArgs compare_args;
    auto* cmp = app.add_subcommand("compare", "Run a loss comparison experiment");
    cmp->add_option("--spec", compare_args.spec, "Experiment spec JSON")->required();
    cmp->add_option("--out", compare_args.out, "Results JSON output path")->required();
    cmp->add_option("--table", compare_args.table, "Optional CSV table output path");

    AblateArgs ablate_args;
    auto* abl = app.add_subcommand(
        "ablate", "Run baselines plus the (alpha, beta) ablation grid");
    abl->add_option("--spec", ablate_args.spec, "Experiment spec JSON")->required();
    abl->add_option("--out", ablate_args.out, "Results JSON output path")->required();

    TradeoffArgs tradeoff_args;
    auto* tro = app.add_subcommand("tradeoff",
                                   "Emit safety-vs-accuracy trade-off points");
    tro->add_option("--results", tradeoff_args.results, "Results JSON from compare/ablate")
        ->required();
    tro->add_option("--out", tradeoff_args.out, "Trade-off CSV output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_data(gen_args);
        if (tr->parsed()) {
            if (train_args.taxonomy.empty() && train_args.preset.empty()) {
                throw std::invalid_argument("train needs --taxonomy or --preset");
            }
            return cmd_train(train_args);
        }
        if (cmp->parsed()) return cmd_compare(compare_args);
        if (abl->parsed()) return cmd_ablate(ablate_args);
        if (tro->parsed()) return cmd_tradeoff(tradeoff_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
