#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskcal/data.hpp"
#include "riskcal/losses.hpp"
#include "riskcal/metrics.hpp"
#include "riskcal/rng.hpp"

namespace riskcal {

enum class Architecture { Linear, MLP1 };
enum class Schedule { Constant, Cosine };

const char* to_string(Architecture arch);
const char* to_string(Schedule schedule);
Architecture architecture_from_string(const std::string& name);
Schedule schedule_from_string(const std::string& name);

/// Linear or one-hidden-layer classifier over a flat parameter vector.
/// Layouts (row-major):
///   Linear: W (K x d), b (K)
///   MLP1:   W1 (h x d), b1 (h), W2 (K x h), b2 (K)
struct Classifier {
    Architecture architecture = Architecture::Linear;
    int input_dim = 0;
    int hidden_dim = 0;  // 0 for Linear
    int num_classes = 0;
    std::vector<double> params;

    std::size_t param_count() const;
    std::vector<double> forward(std::span<const double> x) const;
};

struct ModelConfig {
    Architecture architecture = Architecture::Linear;
    int hidden_dim = 16;  // MLP1 only
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero.
Classifier make_classifier(Architecture architecture, int input_dim,
                           int num_classes, int hidden_dim, Rng& rng);

/// Chain-rule gradient of the loss w.r.t. the parameters, given the gradient
/// w.r.t. the logits. Same layout as Classifier::params.
std::vector<double> backward(const Classifier& model, std::span<const double> x,
                             std::span<const double> grad_logits);

int predict_one(const Classifier& model, std::span<const double> x);

/// Row-wise argmax predictions, lowest-index tie-break.
std::vector<int> predict(const Classifier& model,
                         std::span<const double> features_rowmajor, int num_rows);

ConfusionMatrix confusion_on_split(const Classifier& model, const Dataset& dataset,
                                   std::span<const int> indices);

struct TrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 32;
    int epochs = 0;
    double weight_decay = 0.01;
    Schedule schedule = Schedule::Cosine;
    std::uint64_t seed = 0;
    LossSpec loss;
};

struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    OptimizerState() = default;
    explicit OptimizerState(std::size_t param_count)
        : m(param_count, 0.0), v(param_count, 0.0) {}
};

/// Adam with bias correction plus decoupled weight decay. Throws on
/// non-finite gradients.
void adamw_step(OptimizerState& state, std::vector<double>& params,
                std::span<const double> grads, double lr, double weight_decay);

/// lr(t) = lr_min + 0.5 * (lr_max - lr_min) * (1 + cos(pi * t / total)).
double cosine_lr(long step, long total_steps, double lr_max, double lr_min);

struct EpochRecord {
    double train_loss = 0.0;
    double val_accuracy = 0.0;
    double val_cer = 0.0;
    double learning_rate = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

/// Runs epochs x ceil(N/batch) optimizer steps. All randomness (init and
/// per-epoch shuffling) flows from config.seed; the run is bit-reproducible
/// for a fixed (seed, config, dataset). The recorded learning rate is the one
/// applied at the first step of each epoch.
std::pair<Classifier, TrainHistory> train(const Dataset& dataset,
                                          const ModelConfig& model_config,
                                          const TrainConfig& config);

}  // namespace riskcal
