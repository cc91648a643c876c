#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riskcal/hierarchy.hpp"

namespace riskcal {

/// Integer confusion counts; rows = true class, columns = predicted class.
struct ConfusionMatrix {
    int k = 0;
    std::vector<std::int64_t> counts;  // K x K, row-major

    std::int64_t at(int y, int pred) const {
        return counts[static_cast<size_t>(y) * k + pred];
    }
    std::int64_t& at(int y, int pred) {
        return counts[static_cast<size_t>(y) * k + pred];
    }
    std::int64_t row_sum(int y) const;
    std::int64_t col_sum(int pred) const;
    std::int64_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> true_labels,
                                 std::span<const int> predicted_labels, int k);

/// Critical Error Rate: 100 * fatal / malignant-sample-count. Throws if the
/// matrix holds no malignant samples (the metric is undefined, never 0).
double cer(const ConfusionMatrix& cm, const ClassTaxonomy& taxonomy);

/// Macro-averaged F1 with 0/0 sub-expressions defined as 0.
double f1_macro(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);

/// Confusion matrix partitioned into the three-tier error taxonomy plus the
/// derived metrics.
struct TaxonomyReport {
    std::int64_t correct_count = 0;
    std::int64_t visual_ambiguity_count = 0;
    std::int64_t type1_count = 0;
    std::int64_t type2_count = 0;
    std::int64_t n_benign = 0;
    std::int64_t n_malignant = 0;
    double cer = 0.0;
    double f1_macro = 0.0;
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
};

TaxonomyReport taxonomy_report(const ConfusionMatrix& cm,
                               const ClassTaxonomy& taxonomy);

}  // namespace riskcal
