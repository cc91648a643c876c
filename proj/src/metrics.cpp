#include "riskcal/metrics.hpp"

#include <stdexcept>
#include <string>

namespace riskcal {

std::int64_t ConfusionMatrix::row_sum(int y) const {
    std::int64_t sum = 0;
    for (int p = 0; p < k; ++p) sum += at(y, p);
    return sum;
}

std::int64_t ConfusionMatrix::col_sum(int pred) const {
    std::int64_t sum = 0;
    for (int y = 0; y < k; ++y) sum += at(y, pred);
    return sum;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (std::int64_t c : counts) sum += c;
    return sum;
}

ConfusionMatrix confusion_matrix(std::span<const int> true_labels,
                                 std::span<const int> predicted_labels, int k) {
    if (true_labels.size() != predicted_labels.size()) {
        throw std::invalid_argument("label/prediction length mismatch");
    }
    if (k < 1) throw std::invalid_argument("class count must be >= 1");
    ConfusionMatrix cm;
    cm.k = k;
    cm.counts.assign(static_cast<size_t>(k) * k, 0);
    for (size_t i = 0; i < true_labels.size(); ++i) {
        const int y = true_labels[i];
        const int p = predicted_labels[i];
        if (y < 0 || y >= k || p < 0 || p >= k) {
            throw std::invalid_argument("label out of range at sample " +
                                        std::to_string(i));
        }
        ++cm.at(y, p);
    }
    return cm;
}

namespace {

void check_dims(const ConfusionMatrix& cm, const ClassTaxonomy& taxonomy) {
    if (cm.k != taxonomy.num_classes()) {
        throw std::invalid_argument("confusion matrix is " + std::to_string(cm.k) +
                                    "x" + std::to_string(cm.k) + " but taxonomy has " +
                                    std::to_string(taxonomy.num_classes()) + " classes");
    }
}

}  // namespace

double cer(const ConfusionMatrix& cm, const ClassTaxonomy& taxonomy) {
    check_dims(cm, taxonomy);
    std::int64_t fatal = 0;
    std::int64_t malignant = 0;
    for (int y = 0; y < cm.k; ++y) {
        if (taxonomy.superclass[y] != 1) continue;
        malignant += cm.row_sum(y);
        for (int p = 0; p < cm.k; ++p) {
            if (taxonomy.superclass[p] == 0) fatal += cm.at(y, p);
        }
    }
    if (malignant == 0) {
        throw std::domain_error(
            "CER is undefined: no malignant samples in the evaluated set");
    }
    return 100.0 * static_cast<double>(fatal) / static_cast<double>(malignant);
}

double f1_macro(const ConfusionMatrix& cm) {
    if (cm.k < 2) throw std::invalid_argument("f1_macro needs at least 2 classes");
    double sum = 0.0;
    for (int c = 0; c < cm.k; ++c) {
        const auto tp = static_cast<double>(cm.at(c, c));
        const auto col = static_cast<double>(cm.col_sum(c));
        const auto row = static_cast<double>(cm.row_sum(c));
        const double precision = col > 0 ? tp / col : 0.0;
        const double recall = row > 0 ? tp / row : 0.0;
        const double denom = precision + recall;
        sum += denom > 0 ? 2.0 * precision * recall / denom : 0.0;
    }
    return sum / static_cast<double>(cm.k);
}

double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total == 0) throw std::invalid_argument("accuracy of an empty matrix");
    std::int64_t trace = 0;
    for (int c = 0; c < cm.k; ++c) trace += cm.at(c, c);
    return static_cast<double>(trace) / static_cast<double>(total);
}

TaxonomyReport taxonomy_report(const ConfusionMatrix& cm,
                               const ClassTaxonomy& taxonomy) {
    check_dims(cm, taxonomy);
    TaxonomyReport report;
    for (int y = 0; y < cm.k; ++y) {
        const std::int64_t row = cm.row_sum(y);
        (taxonomy.superclass[y] == 1 ? report.n_malignant : report.n_benign) += row;
        for (int p = 0; p < cm.k; ++p) {
            const std::int64_t count = cm.at(y, p);
            if (count == 0) continue;
            switch (classify_confusion(taxonomy, y, p)) {
                case ErrorKind::Correct: report.correct_count += count; break;
                case ErrorKind::VisualAmbiguity: report.visual_ambiguity_count += count; break;
                case ErrorKind::TypeI: report.type1_count += count; break;
                case ErrorKind::TypeII: report.type2_count += count; break;
            }
        }
    }
    report.cer = cer(cm, taxonomy);
    report.f1_macro = f1_macro(cm);
    report.accuracy = accuracy(cm);
    report.precision.resize(cm.k);
    report.recall.resize(cm.k);
    for (int c = 0; c < cm.k; ++c) {
        const auto tp = static_cast<double>(cm.at(c, c));
        const auto col = static_cast<double>(cm.col_sum(c));
        const auto row = static_cast<double>(cm.row_sum(c));
        report.precision[c] = col > 0 ? tp / col : 0.0;
        report.recall[c] = row > 0 ? tp / row : 0.0;
    }
    return report;
}

}  // namespace riskcal
