#include "riskcal/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace riskcal {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw std::invalid_argument("unknown key '" + key + "' in " + context);
        }
    }
}

const char* to_string(WeightsMode mode) {
    return mode == WeightsMode::Uniform ? "uniform" : "inverse_frequency";
}

WeightsMode weights_mode_from_string(const std::string& name) {
    if (name == "uniform") return WeightsMode::Uniform;
    if (name == "inverse_frequency") return WeightsMode::InverseFrequency;
    throw std::invalid_argument("unknown weights_mode '" + name +
                                "' (expected uniform or inverse_frequency)");
}

}  // namespace

json loss_config_to_json(const LossConfig& config) {
    json j;
    j["kind"] = to_string(config.kind);
    switch (config.kind) {
        case LossKind::CE:
            break;
        case LossKind::WCE:
            j["weights_mode"] = to_string(config.weights_mode);
            break;
        case LossKind::Focal:
            j["gamma"] = config.gamma;
            j["alpha_f"] = config.alpha_f;
            break;
        case LossKind::LabelSmoothing:
            j["epsilon"] = config.epsilon;
            break;
        case LossKind::RCL:
            j["alpha"] = config.alpha;
            j["beta"] = config.beta;
            break;
    }
    return j;
}

LossConfig loss_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("loss spec must be an object");
    check_keys(j, {"kind", "alpha", "beta", "gamma", "alpha_f", "epsilon",
                   "weights_mode", "name"},
               "loss spec");
    if (!j.contains("kind")) throw std::invalid_argument("loss spec needs a kind");
    LossConfig config;
    config.kind = loss_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("gamma")) config.gamma = j.at("gamma").get<double>();
    if (j.contains("alpha_f")) config.alpha_f = j.at("alpha_f").get<double>();
    if (j.contains("epsilon")) config.epsilon = j.at("epsilon").get<double>();
    if (j.contains("weights_mode")) {
        config.weights_mode =
            weights_mode_from_string(j.at("weights_mode").get<std::string>());
    }
    if (config.kind == LossKind::RCL) {
        if (!j.contains("alpha") || !j.contains("beta")) {
            throw std::invalid_argument("rcl loss spec needs alpha and beta");
        }
        config.alpha = j.at("alpha").get<double>();
        config.beta = j.at("beta").get<double>();
    }
    return config;
}

LossConfig load_loss_config_file(const std::string& path) {
    return loss_config_from_json(load_json_file(path));
}

json report_to_json(const TaxonomyReport& report) {
    return json{{"correct_count", report.correct_count},
                {"visual_ambiguity_count", report.visual_ambiguity_count},
                {"type1_count", report.type1_count},
                {"type2_count", report.type2_count},
                {"n_benign", report.n_benign},
                {"n_malignant", report.n_malignant},
                {"cer", report.cer},
                {"f1_macro", report.f1_macro},
                {"accuracy", report.accuracy},
                {"precision", report.precision},
                {"recall", report.recall}};
}

TaxonomyReport report_from_json(const json& j) {
    TaxonomyReport report;
    report.correct_count = j.at("correct_count").get<std::int64_t>();
    report.visual_ambiguity_count = j.at("visual_ambiguity_count").get<std::int64_t>();
    report.type1_count = j.at("type1_count").get<std::int64_t>();
    report.type2_count = j.at("type2_count").get<std::int64_t>();
    report.n_benign = j.at("n_benign").get<std::int64_t>();
    report.n_malignant = j.at("n_malignant").get<std::int64_t>();
    report.cer = j.at("cer").get<double>();
    report.f1_macro = j.at("f1_macro").get<double>();
    report.accuracy = j.at("accuracy").get<double>();
    report.precision = j.at("precision").get<std::vector<double>>();
    report.recall = j.at("recall").get<std::vector<double>>();
    return report;
}

json epoch_record_to_json(const EpochRecord& record) {
    return json{{"train_loss", record.train_loss},
                {"val_accuracy", record.val_accuracy},
                {"val_cer", record.val_cer},
                {"learning_rate", record.learning_rate}};
}

EpochRecord epoch_record_from_json(const json& j) {
    EpochRecord record;
    record.train_loss = j.at("train_loss").get<double>();
    record.val_accuracy = j.at("val_accuracy").get<double>();
    record.val_cer = j.at("val_cer").get<double>();
    record.learning_rate = j.at("learning_rate").get<double>();
    return record;
}

json model_to_json(const Classifier& model, const TrainConfig& config,
                   const LossConfig& loss_config) {
    json params;
    const auto d = static_cast<std::size_t>(model.input_dim);
    const auto k = static_cast<std::size_t>(model.num_classes);
    const auto slice = [&model](std::size_t begin, std::size_t count) {
        return std::vector<double>(model.params.begin() + begin,
                                   model.params.begin() + begin + count);
    };
    if (model.architecture == Architecture::Linear) {
        params["W"] = slice(0, k * d);
        params["b"] = slice(k * d, k);
    } else {
        const auto h = static_cast<std::size_t>(model.hidden_dim);
        params["W1"] = slice(0, h * d);
        params["b1"] = slice(h * d, h);
        params["W2"] = slice(h * d + h, k * h);
        params["b2"] = slice(h * d + h + k * h, k);
    }
    return json{{"architecture", to_string(model.architecture)},
                {"input_dim", model.input_dim},
                {"hidden_dim", model.hidden_dim},
                {"num_classes", model.num_classes},
                {"params", params},
                {"train_config",
                 json{{"learning_rate", config.learning_rate},
                      {"batch_size", config.batch_size},
                      {"epochs", config.epochs},
                      {"weight_decay", config.weight_decay},
                      {"schedule", to_string(config.schedule)},
                      {"seed", config.seed},
                      {"loss", loss_config_to_json(loss_config)}}}};
}

ExperimentSpec experiment_spec_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("experiment spec must be an object");
    check_keys(j, {"dataset", "model", "train", "losses", "seeds", "baseline"},
               "experiment spec");
    ExperimentSpec spec;

    const json& dataset = j.at("dataset");
    check_keys(dataset, {"scenario", "csv", "taxonomy", "preset"}, "dataset source");
    if (dataset.contains("scenario")) {
        spec.dataset.scenario = dataset.at("scenario").get<std::string>();
    } else {
        spec.dataset.csv_path = dataset.at("csv").get<std::string>();
        if (dataset.contains("preset")) {
            spec.dataset.taxonomy_preset = dataset.at("preset").get<std::string>();
        } else if (dataset.contains("taxonomy")) {
            spec.dataset.taxonomy_path = dataset.at("taxonomy").get<std::string>();
        } else {
            throw std::invalid_argument("csv dataset source needs taxonomy or preset");
        }
    }

    if (j.contains("model")) {
        const json& model = j.at("model");
        check_keys(model, {"architecture", "hidden_dim"}, "model config");
        if (model.contains("architecture")) {
            spec.model.architecture =
                architecture_from_string(model.at("architecture").get<std::string>());
        }
        if (model.contains("hidden_dim")) {
            spec.model.hidden_dim = model.at("hidden_dim").get<int>();
        }
    }

    const json& train = j.at("train");
    check_keys(train,
               {"learning_rate", "batch_size", "epochs", "weight_decay", "schedule"},
               "train config");
    spec.train_template.epochs = train.at("epochs").get<int>();
    if (train.contains("learning_rate")) {
        spec.train_template.learning_rate = train.at("learning_rate").get<double>();
    }
    if (train.contains("batch_size")) {
        spec.train_template.batch_size = train.at("batch_size").get<int>();
    }
    if (train.contains("weight_decay")) {
        spec.train_template.weight_decay = train.at("weight_decay").get<double>();
    }
    if (train.contains("schedule")) {
        spec.train_template.schedule =
            schedule_from_string(train.at("schedule").get<std::string>());
    }

    if (j.contains("losses")) {
        for (const json& entry : j.at("losses")) {
            if (!entry.contains("name")) {
                throw std::invalid_argument("each loss entry needs a name");
            }
            spec.losses.push_back({entry.at("name").get<std::string>(),
                                   loss_config_from_json(entry)});
        }
    }
    for (const json& seed : j.at("seeds")) {
        spec.seeds.push_back(seed.get<std::uint64_t>());
    }
    if (j.contains("baseline")) spec.baseline = j.at("baseline").get<std::string>();
    return spec;
}

ExperimentSpec load_experiment_spec_file(const std::string& path) {
    return experiment_spec_from_json(load_json_file(path));
}

json comparison_to_json(const ComparisonResult& result) {
    json runs = json::array();
    for (const auto& run : result.runs) {
        runs.push_back(json{{"loss", run.loss_name},
                            {"seed", run.seed},
                            {"report", report_to_json(run.report)},
                            {"final_epoch", epoch_record_to_json(run.final_epoch)}});
    }
    json aggregates = json::array();
    for (const auto& a : result.aggregates) {
        json entry{{"loss", a.loss_name},
                   {"num_seeds", a.num_seeds},
                   {"cer", json{{"median", a.cer.median}, {"iqr", a.cer.iqr}}},
                   {"f1_macro",
                    json{{"median", a.f1_macro.median}, {"iqr", a.f1_macro.iqr}}},
                   {"accuracy",
                    json{{"median", a.accuracy.median}, {"iqr", a.accuracy.iqr}}}};
        if (a.has_improvement) {
            json improvement{{"absolute", a.improvement_abs},
                             {"formatted", a.improvement_formatted}};
            improvement["relative_percent"] =
                std::isnan(a.improvement_rel_percent)
                    ? json(nullptr)
                    : json(a.improvement_rel_percent);
            entry["cer_improvement"] = improvement;
        }
        aggregates.push_back(entry);
    }
    return json{{"baseline", result.baseline},
                {"runs", runs},
                {"aggregates", aggregates}};
}

ComparisonResult comparison_from_json(const json& j) {
    ComparisonResult result;
    result.baseline = j.at("baseline").get<std::string>();
    for (const json& entry : j.at("runs")) {
        RunResult run;
        run.loss_name = entry.at("loss").get<std::string>();
        run.seed = entry.at("seed").get<std::uint64_t>();
        run.report = report_from_json(entry.at("report"));
        run.final_epoch = epoch_record_from_json(entry.at("final_epoch"));
        result.runs.push_back(std::move(run));
    }
    for (const json& entry : j.at("aggregates")) {
        LossAggregate a;
        a.loss_name = entry.at("loss").get<std::string>();
        a.num_seeds = entry.at("num_seeds").get<int>();
        a.cer = {entry.at("cer").at("median").get<double>(),
                 entry.at("cer").at("iqr").get<double>()};
        a.f1_macro = {entry.at("f1_macro").at("median").get<double>(),
                      entry.at("f1_macro").at("iqr").get<double>()};
        a.accuracy = {entry.at("accuracy").at("median").get<double>(),
                      entry.at("accuracy").at("iqr").get<double>()};
        if (entry.contains("cer_improvement")) {
            const json& improvement = entry.at("cer_improvement");
            a.has_improvement = true;
            a.improvement_abs = improvement.at("absolute").get<double>();
            a.improvement_rel_percent =
                improvement.at("relative_percent").is_null()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : improvement.at("relative_percent").get<double>();
            a.improvement_formatted = improvement.at("formatted").get<std::string>();
        }
        result.aggregates.push_back(std::move(a));
    }
    return result;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing file '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

json load_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error("cannot parse JSON file '" + path + "': " + e.what());
    }
}

}  // namespace riskcal
