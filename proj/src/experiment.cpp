#include "riskcal/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace riskcal {

std::vector<AblationConfig> ablation_grid() {
    return {
        {"Light", 5.0, 5.0},      {"Balanced", 2.0, 10.0},
        {"StructSafe", 5.0, 10.0}, {"Uniform", 10.0, 10.0},
        {"Sparse", 1.0, 20.0},    {"Proposed", 5.0, 20.0},
        {"HighStruct", 10.0, 20.0},
    };
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty sample");
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - std::floor(h)) * (values[lo + 1] - values[lo]);
}

double interquartile_range(std::vector<double> values) {
    return quantile(values, 0.75) - quantile(values, 0.25);
}

std::pair<double, double> cer_improvement(double baseline_cer, double cer) {
    const double absolute = cer - baseline_cer;
    const double relative = baseline_cer != 0.0
                                ? 100.0 * (cer - baseline_cer) / baseline_cer
                                : std::numeric_limits<double>::quiet_NaN();
    return {absolute, relative};
}

std::string format_cer_improvement(double baseline_cer, double cer) {
    const auto [absolute, relative] = cer_improvement(baseline_cer, cer);
    char buffer[64];
    if (std::isnan(relative)) {
        std::snprintf(buffer, sizeof(buffer), "%.2f%% (-)", absolute);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%.2f%% (%.1f%%)", absolute, relative);
    }
    return buffer;
}

Dataset build_dataset(const DatasetSource& source, std::uint64_t seed) {
    if (!source.scenario.empty()) {
        if (source.scenario == "default-overlap") {
            return default_overlap_scenario(seed);
        }
        throw std::invalid_argument("unknown scenario '" + source.scenario +
                                    "' (available: default-overlap)");
    }
    if (source.csv_path.empty()) {
        throw std::invalid_argument("dataset source needs a scenario or a csv path");
    }
    ClassTaxonomy taxonomy = !source.taxonomy_preset.empty()
                                 ? taxonomy_preset(source.taxonomy_preset)
                                 : load_taxonomy_file(source.taxonomy_path);
    Dataset dataset = load_csv(source.csv_path, taxonomy);
    return stratified_split(std::move(dataset), {0.70, 0.15, 0.15}, seed);
}

namespace {

const LossConfig& find_loss(const ExperimentSpec& spec, const std::string& name) {
    for (const auto& entry : spec.losses) {
        if (entry.name == name) return entry.config;
    }
    std::string available;
    for (const auto& entry : spec.losses) {
        if (!available.empty()) available += ", ";
        available += entry.name;
    }
    throw std::invalid_argument("unknown loss '" + name + "' (available: " +
                                available + ")");
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.losses.empty()) {
        throw std::invalid_argument("experiment spec must name at least one loss");
    }
    if (spec.seeds.empty()) {
        throw std::invalid_argument("experiment spec must list at least one seed");
    }
    std::set<std::string> names;
    for (const auto& entry : spec.losses) {
        if (entry.name.empty()) throw std::invalid_argument("loss entries need names");
        if (!names.insert(entry.name).second) {
            throw std::invalid_argument("duplicate loss name '" + entry.name + "'");
        }
    }
    std::set<std::uint64_t> seeds(spec.seeds.begin(), spec.seeds.end());
    if (seeds.size() != spec.seeds.size()) {
        throw std::invalid_argument("duplicate seeds in experiment spec");
    }
    if (!spec.baseline.empty() && names.find(spec.baseline) == names.end()) {
        throw std::invalid_argument("baseline '" + spec.baseline +
                                    "' is not among the spec's losses");
    }
}

}  // namespace

RunResult run_single(const ExperimentSpec& spec, const std::string& loss_name,
                     std::uint64_t seed) {
    const LossConfig& config = find_loss(spec, loss_name);
    const auto start = std::chrono::steady_clock::now();

    Dataset dataset = build_dataset(spec.dataset, seed);
    const auto train_counts = dataset.class_counts(dataset.split.train);

    TrainConfig train_config = spec.train_template;
    train_config.seed = seed;
    train_config.loss = resolve_loss(config, dataset.taxonomy, train_counts);

    auto [model, history] = train(dataset, spec.model, train_config);
    const ConfusionMatrix test_cm =
        confusion_on_split(model, dataset, dataset.split.test);

    RunResult result;
    result.loss_name = loss_name;
    result.seed = seed;
    result.report = taxonomy_report(test_cm, dataset.taxonomy);
    result.final_epoch = history.epochs.back();
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ComparisonResult run_comparison(const ExperimentSpec& spec) {
    validate_spec(spec);

    ComparisonResult result;
    result.baseline = spec.baseline;
    for (const auto& entry : spec.losses) {
        for (std::uint64_t seed : spec.seeds) {
            result.runs.push_back(run_single(spec, entry.name, seed));
        }
    }
    std::sort(result.runs.begin(), result.runs.end(),
              [](const RunResult& a, const RunResult& b) {
                  if (a.loss_name != b.loss_name) return a.loss_name < b.loss_name;
                  return a.seed < b.seed;
              });

    double baseline_cer_median = 0.0;
    if (!spec.baseline.empty()) {
        std::vector<double> cers;
        for (const auto& run : result.runs) {
            if (run.loss_name == spec.baseline) cers.push_back(run.report.cer);
        }
        baseline_cer_median = median(cers);
    }

    for (const auto& entry : spec.losses) {
        std::vector<double> cers, f1s, accs;
        for (const auto& run : result.runs) {
            if (run.loss_name != entry.name) continue;
            cers.push_back(run.report.cer);
            f1s.push_back(run.report.f1_macro);
            accs.push_back(run.report.accuracy);
        }
        LossAggregate aggregate;
        aggregate.loss_name = entry.name;
        aggregate.num_seeds = static_cast<int>(cers.size());
        aggregate.cer = {median(cers), interquartile_range(cers)};
        aggregate.f1_macro = {median(f1s), interquartile_range(f1s)};
        aggregate.accuracy = {median(accs), interquartile_range(accs)};
        if (!spec.baseline.empty() && entry.name != spec.baseline) {
            aggregate.has_improvement = true;
            std::tie(aggregate.improvement_abs, aggregate.improvement_rel_percent) =
                cer_improvement(baseline_cer_median, aggregate.cer.median);
            aggregate.improvement_formatted =
                format_cer_improvement(baseline_cer_median, aggregate.cer.median);
        }
        result.aggregates.push_back(std::move(aggregate));
    }
    return result;
}

ComparisonResult run_ablation(const ExperimentSpec& spec) {
    ExperimentSpec ablation = spec;
    ablation.losses.clear();
    ablation.losses.push_back({"CE", LossConfig{}});
    LossConfig wce;
    wce.kind = LossKind::WCE;
    ablation.losses.push_back({"WCE", wce});
    LossConfig focal;
    focal.kind = LossKind::Focal;
    ablation.losses.push_back({"Focal", focal});
    LossConfig smoothing;
    smoothing.kind = LossKind::LabelSmoothing;
    ablation.losses.push_back({"LabelSmoothing", smoothing});
    for (const auto& entry : ablation_grid()) {
        LossConfig rcl;
        rcl.kind = LossKind::RCL;
        rcl.alpha = entry.alpha;
        rcl.beta = entry.beta;
        ablation.losses.push_back({"RCL-" + entry.name, rcl});
    }
    if (ablation.baseline.empty()) ablation.baseline = "CE";

    ComparisonResult result = run_comparison(ablation);
    std::stable_sort(result.aggregates.begin(), result.aggregates.end(),
                     [](const LossAggregate& a, const LossAggregate& b) {
                         return a.cer.median < b.cer.median;
                     });
    return result;
}

namespace {

std::string number_repr(double value) { return nlohmann::json(value).dump(); }

std::string fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

}  // namespace

std::string render_table_csv(const ComparisonResult& result) {
    std::string out =
        "loss,seeds,cer_median,cer_iqr,f1_macro_median,f1_macro_iqr,"
        "accuracy_median,accuracy_iqr,cer_improvement\n";
    for (const auto& a : result.aggregates) {
        out += a.loss_name;
        out += ',' + std::to_string(a.num_seeds);
        out += ',' + fixed(a.cer.median, 2);
        out += ',' + fixed(a.cer.iqr, 2);
        out += ',' + fixed(a.f1_macro.median, 4);
        out += ',' + fixed(a.f1_macro.iqr, 4);
        out += ',' + fixed(a.accuracy.median, 4);
        out += ',' + fixed(a.accuracy.iqr, 4);
        out += ',';
        if (a.has_improvement) out += a.improvement_formatted;
        out += '\n';
    }
    return out;
}

std::string render_tradeoff_csv(const ComparisonResult& result) {
    if (result.aggregates.empty()) {
        throw std::invalid_argument("no results to emit trade-off points from");
    }
    std::string out =
        "# cer_percent is the safety axis (lower is safer); the preferred "
        "corner is high f1_macro at low cer_percent\n";
    out += "name,f1_macro,cer_percent\n";
    for (const auto& a : result.aggregates) {
        out += a.loss_name;
        out += ',' + number_repr(a.f1_macro.median);
        out += ',' + number_repr(a.cer.median);
        out += '\n';
    }
    return out;
}

}  // namespace riskcal
