#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskcal/data.hpp"
#include "riskcal/losses.hpp"
#include "riskcal/metrics.hpp"
#include "riskcal/model.hpp"

namespace riskcal {

/// Synthetic scenario name, or a CSV path plus taxonomy file/preset.
struct DatasetSource {
    std::string scenario;
    std::string csv_path;
    std::string taxonomy_path;
    std::string taxonomy_preset;
};

struct NamedLossConfig {
    std::string name;
    LossConfig config;
};

struct ExperimentSpec {
    DatasetSource dataset;
    ModelConfig model;
    TrainConfig train_template;  // loss member is filled per run
    std::vector<NamedLossConfig> losses;
    std::vector<std::uint64_t> seeds;
    std::string baseline;  // loss name improvements are measured against
};

struct RunResult {
    std::string loss_name;
    std::uint64_t seed = 0;
    TaxonomyReport report;  // test split
    EpochRecord final_epoch;
    double wall_seconds = 0.0;  // informational only, kept out of results.json
};

struct AggregateStats {
    double median = 0.0;
    double iqr = 0.0;
};

struct LossAggregate {
    std::string loss_name;
    int num_seeds = 0;
    AggregateStats cer;
    AggregateStats f1_macro;
    AggregateStats accuracy;
    bool has_improvement = false;
    double improvement_abs = 0.0;
    double improvement_rel_percent = 0.0;  // NaN when the baseline CER is 0
    std::string improvement_formatted;
};

struct ComparisonResult {
    std::string baseline;
    std::vector<RunResult> runs;  // sorted by (loss name, seed)
    std::vector<LossAggregate> aggregates;
};

struct AblationConfig {
    std::string name;
    double alpha = 1.0;
    double beta = 1.0;
};

/// The seven named (alpha, beta) ablation configurations.
std::vector<AblationConfig> ablation_grid();

/// Median of the sample (average of the two middle values for even sizes).
double median(std::vector<double> values);

/// Linearly interpolated quantile (the type-7 convention).
double quantile(std::vector<double> values, double q);

double interquartile_range(std::vector<double> values);

/// (absolute, relative-percent) change of cer vs baseline_cer; the relative
/// part is NaN when baseline_cer is 0.
std::pair<double, double> cer_improvement(double baseline_cer, double cer);

/// Results-table cell, e.g. "-9.88% (-92.4%)"; "(-)" when the relative part
/// is undefined.
std::string format_cer_improvement(double baseline_cer, double cer);

Dataset build_dataset(const DatasetSource& source, std::uint64_t seed);

RunResult run_single(const ExperimentSpec& spec, const std::string& loss_name,
                     std::uint64_t seed);

/// One run per (loss, seed); aggregates hold median and IQR per loss, plus
/// CER improvement vs the named baseline. Aggregates keep the spec's loss
/// order.
ComparisonResult run_comparison(const ExperimentSpec& spec);

/// CE, WCE, Focal and LabelSmoothing baselines plus the seven ablation
/// configurations under the spec's TrainConfig; aggregates sorted by median
/// CER ascending. Baseline defaults to CE when the spec names none.
ComparisonResult run_ablation(const ExperimentSpec& spec);

/// CSV table view of the aggregates (CER at 2 decimals, f1/accuracy at 4).
std::string render_table_csv(const ComparisonResult& result);

/// Trade-off points "name,f1_macro,cer_percent", one per loss, medians at
/// full precision.
std::string render_tradeoff_csv(const ComparisonResult& result);

}  // namespace riskcal
