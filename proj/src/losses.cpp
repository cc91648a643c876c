#include "riskcal/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskcal {

const char* to_string(LossKind kind) {
    switch (kind) {
        case LossKind::CE: return "ce";
        case LossKind::WCE: return "wce";
        case LossKind::Focal: return "focal";
        case LossKind::LabelSmoothing: return "label_smoothing";
        case LossKind::RCL: return "rcl";
    }
    throw std::logic_error("unhandled LossKind");
}

LossKind loss_kind_from_string(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower == "ce") return LossKind::CE;
    if (lower == "wce") return LossKind::WCE;
    if (lower == "focal") return LossKind::Focal;
    if (lower == "label_smoothing" || lower == "labelsmoothing")
        return LossKind::LabelSmoothing;
    if (lower == "rcl") return LossKind::RCL;
    throw std::invalid_argument(
        "unknown loss kind '" + name +
        "' (expected ce, wce, focal, label_smoothing or rcl)");
}

namespace {

void check_finite(std::span<const double> logits) {
    if (logits.empty()) throw std::invalid_argument("empty logits");
    for (double z : logits) {
        if (!std::isfinite(z)) throw std::invalid_argument("non-finite logit");
    }
}

void check_label(std::span<const double> logits, int y) {
    if (y < 0 || static_cast<size_t>(y) >= logits.size()) {
        throw std::invalid_argument("label " + std::to_string(y) +
                                    " out of range [0, " +
                                    std::to_string(logits.size()) + ")");
    }
}

}  // namespace

int argmax_lowest(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax of empty vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

double log_sum_exp(std::span<const double> logits) {
    check_finite(logits);
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - m);
    return m + std::log(sum);
}

std::vector<double> softmax(std::span<const double> logits) {
    check_finite(logits);
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> probs(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - m);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

LossResult ce_loss(std::span<const double> logits, int y) {
    check_label(logits, y);
    LossResult result;
    result.value = log_sum_exp(logits) - logits[y];
    result.grad_logits = softmax(logits);
    result.grad_logits[y] -= 1.0;
    return result;
}

LossResult wce_loss(std::span<const double> logits, int y,
                    std::span<const double> weights) {
    if (weights.size() != logits.size()) {
        throw std::invalid_argument("weight vector length mismatch");
    }
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("class weights must be positive");
    }
    check_label(logits, y);
    LossResult result = ce_loss(logits, y);
    const double w = weights[y];
    result.value *= w;
    for (double& g : result.grad_logits) g *= w;
    return result;
}

std::vector<double> class_weights_from_counts(std::span<const std::int64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("empty class counts");
    std::vector<double> weights(counts.size());
    double sum = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 1) {
            throw std::invalid_argument("class " + std::to_string(i) +
                                        " has zero samples; cannot derive a weight");
        }
        weights[i] = 1.0 / static_cast<double>(counts[i]);
        sum += weights[i];
    }
    const double mean = sum / static_cast<double>(counts.size());
    for (double& w : weights) w /= mean;
    return weights;
}

LossResult focal_loss(std::span<const double> logits, int y, double gamma,
                      double alpha_f) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    if (!(alpha_f > 0.0)) throw std::invalid_argument("alpha_f must be > 0");
    check_label(logits, y);
    if (gamma == 0.0) {
        // (1 - p)^0 == 1: plain cross-entropy scaled by alpha_f.
        LossResult result = ce_loss(logits, y);
        result.value *= alpha_f;
        for (double& g : result.grad_logits) g *= alpha_f;
        return result;
    }
    const double lse = log_sum_exp(logits);
    const double log_p = logits[y] - lse;      // <= 0
    const double p = std::exp(log_p);
    const double one_minus_p = -std::expm1(log_p);

    LossResult result;
    result.grad_logits.assign(logits.size(), 0.0);
    if (one_minus_p <= 0.0) {
        // p rounded to 1: zero loss, zero gradient.
        return result;
    }
    result.value = -alpha_f * std::pow(one_minus_p, gamma) * log_p;
    // d/dz_j = alpha_f * (1-p)^(gamma-1) * (gamma*p*log p + p - 1) * (1[j==y] - p_j)
    const double factor = alpha_f * std::pow(one_minus_p, gamma - 1.0) *
                          (gamma * p * log_p - one_minus_p);
    const std::vector<double> probs = softmax(logits);
    for (size_t j = 0; j < logits.size(); ++j) {
        const double indicator = (static_cast<int>(j) == y) ? 1.0 : 0.0;
        result.grad_logits[j] = factor * (indicator - probs[j]);
    }
    return result;
}

LossResult label_smoothing_loss(std::span<const double> logits, int y,
                                double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in [0, 1)");
    }
    check_label(logits, y);
    const size_t k = logits.size();
    const double lse = log_sum_exp(logits);
    double logits_sum = 0.0;
    for (double z : logits) logits_sum += z;

    LossResult result;
    result.value = lse - ((1.0 - epsilon) * logits[y] +
                          (epsilon / static_cast<double>(k)) * logits_sum);
    result.grad_logits = softmax(logits);
    const double uniform_mass = epsilon / static_cast<double>(k);
    for (size_t j = 0; j < k; ++j) {
        double target = uniform_mass;
        if (static_cast<int>(j) == y) target += 1.0 - epsilon;
        result.grad_logits[j] -= target;
    }
    return result;
}

LossResult rcl_loss(std::span<const double> logits, int y,
                    const SeverityMatrix& severity) {
    if (severity.k != static_cast<int>(logits.size())) {
        throw std::invalid_argument(
            "severity matrix is " + std::to_string(severity.k) + "x" +
            std::to_string(severity.k) + " but logits have length " +
            std::to_string(logits.size()));
    }
    check_label(logits, y);
    const int y_hat = argmax_lowest(logits);
    // The multiplier is piecewise constant in the logits; it scales the loss
    // but contributes no gradient of its own.
    const double multiplier = severity.at(y, y_hat);
    LossResult result = ce_loss(logits, y);
    result.value *= multiplier;
    for (double& g : result.grad_logits) g *= multiplier;
    return result;
}

LossResult evaluate_loss(const LossSpec& spec, std::span<const double> logits, int y) {
    switch (spec.kind) {
        case LossKind::CE:
            return ce_loss(logits, y);
        case LossKind::WCE:
            return wce_loss(logits, y, spec.class_weights);
        case LossKind::Focal:
            return focal_loss(logits, y, spec.gamma, spec.alpha_f);
        case LossKind::LabelSmoothing:
            return label_smoothing_loss(logits, y, spec.epsilon);
        case LossKind::RCL:
            return rcl_loss(logits, y, spec.severity);
    }
    throw std::logic_error("unhandled LossKind");
}

LossSpec resolve_loss(const LossConfig& config, const ClassTaxonomy& taxonomy,
                      std::span<const std::int64_t> train_class_counts) {
    LossSpec spec;
    spec.kind = config.kind;
    switch (config.kind) {
        case LossKind::CE:
            break;
        case LossKind::WCE:
            if (config.weights_mode == WeightsMode::Uniform) {
                spec.class_weights.assign(taxonomy.num_classes(), 1.0);
            } else {
                if (train_class_counts.size() !=
                    static_cast<size_t>(taxonomy.num_classes())) {
                    throw std::invalid_argument(
                        "class counts length does not match taxonomy");
                }
                spec.class_weights = class_weights_from_counts(train_class_counts);
            }
            break;
        case LossKind::Focal:
            if (!(config.gamma >= 0.0))
                throw std::invalid_argument("gamma must be >= 0");
            if (!(config.alpha_f > 0.0))
                throw std::invalid_argument("alpha_f must be > 0");
            spec.gamma = config.gamma;
            spec.alpha_f = config.alpha_f;
            break;
        case LossKind::LabelSmoothing:
            if (!(config.epsilon >= 0.0 && config.epsilon < 1.0))
                throw std::invalid_argument("epsilon must lie in [0, 1)");
            spec.epsilon = config.epsilon;
            break;
        case LossKind::RCL:
            spec.severity = build_severity_matrix(taxonomy, config.alpha, config.beta);
            break;
    }
    return spec;
}

BatchLossResult batch_loss(const LossSpec& spec,
                           const std::vector<std::vector<double>>& logits_batch,
                           std::span<const int> labels) {
    if (logits_batch.empty()) throw std::invalid_argument("empty batch");
    if (logits_batch.size() != labels.size()) {
        throw std::invalid_argument("batch has " +
                                    std::to_string(logits_batch.size()) +
                                    " logit rows but " +
                                    std::to_string(labels.size()) + " labels");
    }
    const double inv_batch = 1.0 / static_cast<double>(logits_batch.size());
    BatchLossResult result;
    result.grad_logits.reserve(logits_batch.size());
    double value_sum = 0.0;
    for (size_t i = 0; i < logits_batch.size(); ++i) {
        LossResult sample = evaluate_loss(spec, logits_batch[i], labels[i]);
        value_sum += sample.value;
        for (double& g : sample.grad_logits) g *= inv_batch;
        result.grad_logits.push_back(std::move(sample.grad_logits));
    }
    result.value = value_sum * inv_batch;
    return result;
}

}  // namespace riskcal
