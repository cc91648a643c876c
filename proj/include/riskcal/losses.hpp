#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskcal/hierarchy.hpp"

namespace riskcal {

enum class LossKind { CE, WCE, Focal, LabelSmoothing, RCL };
enum class WeightsMode { Uniform, InverseFrequency };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

/// Serializable loss description, resolved into a concrete LossSpec once the
/// taxonomy and training-split class counts are known.
struct LossConfig {
    LossKind kind = LossKind::CE;
    double alpha = 0.0;    // RCL Type I multiplier; must be set explicitly
    double beta = 0.0;     // RCL Type II multiplier; must be set explicitly
    double gamma = 2.0;    // Focal focusing parameter
    double alpha_f = 1.0;  // Focal balance factor
    double epsilon = 0.1;  // LabelSmoothing factor
    WeightsMode weights_mode = WeightsMode::InverseFrequency;  // WCE
};

/// Concrete objective: exactly the fields for its kind are meaningful.
struct LossSpec {
    LossKind kind = LossKind::CE;
    std::vector<double> class_weights;  // WCE, length K
    double gamma = 2.0;                 // Focal
    double alpha_f = 1.0;               // Focal
    double epsilon = 0.1;               // LabelSmoothing
    SeverityMatrix severity;            // RCL
};

LossSpec resolve_loss(const LossConfig& config, const ClassTaxonomy& taxonomy,
                      std::span<const std::int64_t> train_class_counts);

/// Loss value (nats) plus the analytic gradient w.r.t. the logits.
struct LossResult {
    double value = 0.0;
    std::vector<double> grad_logits;
};

/// Index of the largest component, lowest index on ties. Shared by rcl_loss
/// and predict so both resolve ties identically.
int argmax_lowest(std::span<const double> values);

/// Max-shifted softmax; throws on non-finite input.
std::vector<double> softmax(std::span<const double> logits);

double log_sum_exp(std::span<const double> logits);

LossResult ce_loss(std::span<const double> logits, int y);

LossResult wce_loss(std::span<const double> logits, int y,
                    std::span<const double> weights);

/// w_c = 1/counts_c scaled so that mean(w) == 1.
std::vector<double> class_weights_from_counts(std::span<const std::int64_t> counts);

LossResult focal_loss(std::span<const double> logits, int y, double gamma,
                      double alpha_f);

LossResult label_smoothing_loss(std::span<const double> logits, int y,
                                double epsilon);

/// Cross-entropy scaled by the severity multiplier M[y][argmax(logits)].
/// The multiplier is a constant per sample; no gradient flows through the
/// argmax.
LossResult rcl_loss(std::span<const double> logits, int y,
                    const SeverityMatrix& severity);

LossResult evaluate_loss(const LossSpec& spec, std::span<const double> logits, int y);

/// Mean loss over a batch; grad_logits[i] is the per-sample gradient already
/// scaled by 1/batch_size. Summation order is fixed (sample order).
struct BatchLossResult {
    double value = 0.0;
    std::vector<std::vector<double>> grad_logits;
};

BatchLossResult batch_loss(const LossSpec& spec,
                           const std::vector<std::vector<double>>& logits_batch,
                           std::span<const int> labels);

}  // namespace riskcal
