#include "riskcal/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riskcal {

const char* to_string(Architecture arch) {
    return arch == Architecture::Linear ? "linear" : "mlp1";
}

const char* to_string(Schedule schedule) {
    return schedule == Schedule::Constant ? "constant" : "cosine";
}

Architecture architecture_from_string(const std::string& name) {
    if (name == "linear") return Architecture::Linear;
    if (name == "mlp1") return Architecture::MLP1;
    throw std::invalid_argument("unknown architecture '" + name +
                                "' (expected linear or mlp1)");
}

Schedule schedule_from_string(const std::string& name) {
    if (name == "constant") return Schedule::Constant;
    if (name == "cosine") return Schedule::Cosine;
    throw std::invalid_argument("unknown schedule '" + name +
                                "' (expected constant or cosine)");
}

std::size_t Classifier::param_count() const {
    const auto d = static_cast<std::size_t>(input_dim);
    const auto h = static_cast<std::size_t>(hidden_dim);
    const auto k = static_cast<std::size_t>(num_classes);
    if (architecture == Architecture::Linear) return d * k + k;
    return d * h + h + h * k + k;
}

std::vector<double> Classifier::forward(std::span<const double> x) const {
    if (x.size() != static_cast<size_t>(input_dim)) {
        throw std::invalid_argument("input has dimension " +
                                    std::to_string(x.size()) + ", model expects " +
                                    std::to_string(input_dim));
    }
    const int d = input_dim;
    const int k = num_classes;
    std::vector<double> logits(k);
    if (architecture == Architecture::Linear) {
        const double* w = params.data();
        const double* b = params.data() + static_cast<size_t>(k) * d;
        for (int c = 0; c < k; ++c) {
            double sum = b[c];
            for (int j = 0; j < d; ++j) sum += w[static_cast<size_t>(c) * d + j] * x[j];
            logits[c] = sum;
        }
        return logits;
    }
    const int h = hidden_dim;
    const double* w1 = params.data();
    const double* b1 = params.data() + static_cast<size_t>(h) * d;
    const double* w2 = b1 + h;
    const double* b2 = w2 + static_cast<size_t>(k) * h;
    std::vector<double> hidden(h);
    for (int u = 0; u < h; ++u) {
        double sum = b1[u];
        for (int j = 0; j < d; ++j) sum += w1[static_cast<size_t>(u) * d + j] * x[j];
        hidden[u] = sum > 0.0 ? sum : 0.0;
    }
    for (int c = 0; c < k; ++c) {
        double sum = b2[c];
        for (int u = 0; u < h; ++u) sum += w2[static_cast<size_t>(c) * h + u] * hidden[u];
        logits[c] = sum;
    }
    return logits;
}

Classifier make_classifier(Architecture architecture, int input_dim,
                           int num_classes, int hidden_dim, Rng& rng) {
    if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
    if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (architecture == Architecture::MLP1 && hidden_dim < 1) {
        throw std::invalid_argument("hidden_dim must be >= 1 for mlp1");
    }
    Classifier model;
    model.architecture = architecture;
    model.input_dim = input_dim;
    model.hidden_dim = architecture == Architecture::MLP1 ? hidden_dim : 0;
    model.num_classes = num_classes;
    model.params.assign(model.param_count(), 0.0);

    const auto init_block = [&rng](double* begin, std::size_t count, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i) begin[i] = rng.uniform(-bound, bound);
    };
    const auto d = static_cast<std::size_t>(input_dim);
    const auto k = static_cast<std::size_t>(num_classes);
    if (architecture == Architecture::Linear) {
        init_block(model.params.data(), k * d, input_dim);
    } else {
        const auto h = static_cast<std::size_t>(hidden_dim);
        init_block(model.params.data(), h * d, input_dim);
        init_block(model.params.data() + h * d + h, k * h, hidden_dim);
    }
    return model;
}

std::vector<double> backward(const Classifier& model, std::span<const double> x,
                             std::span<const double> grad_logits) {
    if (grad_logits.size() != static_cast<size_t>(model.num_classes)) {
        throw std::invalid_argument("grad_logits length mismatch");
    }
    if (x.size() != static_cast<size_t>(model.input_dim)) {
        throw std::invalid_argument("input dimension mismatch");
    }
    const int d = model.input_dim;
    const int k = model.num_classes;
    std::vector<double> grads(model.param_count(), 0.0);
    if (model.architecture == Architecture::Linear) {
        double* gw = grads.data();
        double* gb = grads.data() + static_cast<size_t>(k) * d;
        for (int c = 0; c < k; ++c) {
            for (int j = 0; j < d; ++j) gw[static_cast<size_t>(c) * d + j] = grad_logits[c] * x[j];
            gb[c] = grad_logits[c];
        }
        return grads;
    }
    const int h = model.hidden_dim;
    const double* w1 = model.params.data();
    const double* b1 = model.params.data() + static_cast<size_t>(h) * d;
    const double* w2 = b1 + h;
    double* gw1 = grads.data();
    double* gb1 = grads.data() + static_cast<size_t>(h) * d;
    double* gw2 = gb1 + h;
    double* gb2 = gw2 + static_cast<size_t>(k) * h;

    std::vector<double> pre(h);
    std::vector<double> hidden(h);
    for (int u = 0; u < h; ++u) {
        double sum = b1[u];
        for (int j = 0; j < d; ++j) sum += w1[static_cast<size_t>(u) * d + j] * x[j];
        pre[u] = sum;
        hidden[u] = sum > 0.0 ? sum : 0.0;
    }
    std::vector<double> grad_hidden(h, 0.0);
    for (int c = 0; c < k; ++c) {
        for (int u = 0; u < h; ++u) {
            gw2[static_cast<size_t>(c) * h + u] = grad_logits[c] * hidden[u];
            grad_hidden[u] += w2[static_cast<size_t>(c) * h + u] * grad_logits[c];
        }
        gb2[c] = grad_logits[c];
    }
    for (int u = 0; u < h; ++u) {
        const double grad_pre = pre[u] > 0.0 ? grad_hidden[u] : 0.0;
        for (int j = 0; j < d; ++j) gw1[static_cast<size_t>(u) * d + j] = grad_pre * x[j];
        gb1[u] = grad_pre;
    }
    return grads;
}

int predict_one(const Classifier& model, std::span<const double> x) {
    const std::vector<double> logits = model.forward(x);
    return argmax_lowest(logits);
}

std::vector<int> predict(const Classifier& model,
                         std::span<const double> features_rowmajor, int num_rows) {
    if (features_rowmajor.size() !=
        static_cast<size_t>(num_rows) * model.input_dim) {
        throw std::invalid_argument("feature matrix size mismatch");
    }
    std::vector<int> predictions(num_rows);
    for (int i = 0; i < num_rows; ++i) {
        predictions[i] = predict_one(
            model, features_rowmajor.subspan(
                       static_cast<size_t>(i) * model.input_dim, model.input_dim));
    }
    return predictions;
}

ConfusionMatrix confusion_on_split(const Classifier& model, const Dataset& dataset,
                                   std::span<const int> indices) {
    std::vector<int> truth;
    std::vector<int> predicted;
    truth.reserve(indices.size());
    predicted.reserve(indices.size());
    for (int i : indices) {
        truth.push_back(dataset.labels[i]);
        predicted.push_back(predict_one(model, dataset.row(i)));
    }
    return confusion_matrix(truth, predicted, dataset.taxonomy.num_classes());
}

void adamw_step(OptimizerState& state, std::vector<double>& params,
                std::span<const double> grads, double lr, double weight_decay) {
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw std::invalid_argument("optimizer state/parameter shape mismatch");
    }
    for (size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw std::runtime_error("non-finite gradient at parameter " +
                                     std::to_string(i) + "; aborting step " +
                                     std::to_string(state.t + 1));
        }
    }
    ++state.t;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        params[i] -= lr * (m_hat / (std::sqrt(v_hat) + state.eps) +
                           weight_decay * params[i]);
    }
}

double cosine_lr(long step, long total_steps, double lr_max, double lr_min) {
    if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
    if (step < 0 || step > total_steps) {
        throw std::invalid_argument("step " + std::to_string(step) +
                                    " outside [0, " + std::to_string(total_steps) + "]");
    }
    const double phase = 3.14159265358979323846 * static_cast<double>(step) /
                         static_cast<double>(total_steps);
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase));
}

namespace {

void validate_train_inputs(const Dataset& dataset, const ModelConfig& model_config,
                           const TrainConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(config.learning_rate > 0.0)) {
        throw std::invalid_argument("learning_rate must be positive");
    }
    if (config.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (dataset.split.train.empty()) throw std::invalid_argument("empty training split");
    if (dataset.split.val.empty()) throw std::invalid_argument("empty validation split");

    const auto train_counts = dataset.class_counts(dataset.split.train);
    for (int c = 0; c < dataset.taxonomy.num_classes(); ++c) {
        if (train_counts[c] == 0) {
            throw std::invalid_argument("class '" + dataset.taxonomy.class_names[c] +
                                        "' has no training samples");
        }
    }
    bool val_has_malignant = false;
    for (int i : dataset.split.val) {
        if (dataset.taxonomy.superclass[dataset.labels[i]] == 1) {
            val_has_malignant = true;
            break;
        }
    }
    if (!val_has_malignant) {
        throw std::invalid_argument(
            "validation split has no malignant samples; validation CER is undefined");
    }
    if (model_config.architecture == Architecture::MLP1 && model_config.hidden_dim < 1) {
        throw std::invalid_argument("hidden_dim must be >= 1 for mlp1");
    }
}

}  // namespace

std::pair<Classifier, TrainHistory> train(const Dataset& dataset,
                                          const ModelConfig& model_config,
                                          const TrainConfig& config) {
    validate_train_inputs(dataset, model_config, config);
    const int k = dataset.taxonomy.num_classes();

    Rng rng(config.seed);
    Classifier model = make_classifier(model_config.architecture, dataset.feature_dim,
                                       k, model_config.hidden_dim, rng);
    OptimizerState opt(model.param_count());

    const long n_train = static_cast<long>(dataset.split.train.size());
    const long steps_per_epoch = (n_train + config.batch_size - 1) / config.batch_size;
    const long total_steps = steps_per_epoch * config.epochs;

    std::vector<int> order(dataset.split.train.begin(), dataset.split.train.end());
    TrainHistory history;
    history.epochs.reserve(config.epochs);

    long step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss_sum = 0.0;
        double epoch_lr = 0.0;
        for (long start = 0; start < n_train; start += config.batch_size) {
            const long stop = std::min(start + config.batch_size, n_train);
            const auto batch = static_cast<size_t>(stop - start);

            std::vector<std::vector<double>> logits_batch;
            std::vector<int> labels_batch;
            logits_batch.reserve(batch);
            labels_batch.reserve(batch);
            for (long i = start; i < stop; ++i) {
                logits_batch.push_back(model.forward(dataset.row(order[i])));
                labels_batch.push_back(dataset.labels[order[i]]);
            }
            const BatchLossResult loss = batch_loss(config.loss, logits_batch, labels_batch);
            if (!std::isfinite(loss.value)) {
                throw std::runtime_error("non-finite loss at epoch " +
                                         std::to_string(epoch) + ", step " +
                                         std::to_string(step));
            }
            epoch_loss_sum += loss.value * static_cast<double>(batch);

            std::vector<double> grads(model.param_count(), 0.0);
            for (size_t b = 0; b < batch; ++b) {
                const std::vector<double> sample =
                    backward(model, dataset.row(order[start + static_cast<long>(b)]),
                             loss.grad_logits[b]);
                for (size_t j = 0; j < grads.size(); ++j) grads[j] += sample[j];
            }

            const double lr = config.schedule == Schedule::Cosine
                                  ? cosine_lr(step, total_steps, config.learning_rate, 0.0)
                                  : config.learning_rate;
            if (start == 0) epoch_lr = lr;
            adamw_step(opt, model.params, grads, lr, config.weight_decay);
            ++step;
        }

        const ConfusionMatrix val_cm =
            confusion_on_split(model, dataset, dataset.split.val);
        EpochRecord record;
        record.train_loss = epoch_loss_sum / static_cast<double>(n_train);
        record.val_accuracy = accuracy(val_cm);
        record.val_cer = cer(val_cm, dataset.taxonomy);
        record.learning_rate = epoch_lr;
        history.epochs.push_back(record);
    }
    return {std::move(model), std::move(history)};
}

}  // namespace riskcal
