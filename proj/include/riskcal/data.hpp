#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskcal/hierarchy.hpp"

namespace riskcal {

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

/// Feature matrix plus integer labels and disjoint, exhaustive split indices.
struct Dataset {
    int feature_dim = 0;
    std::vector<double> features;  // N x d, row-major
    std::vector<int> labels;
    ClassTaxonomy taxonomy;
    SplitIndices split;

    int num_samples() const { return static_cast<int>(labels.size()); }
    std::span<const double> row(int i) const {
        return {features.data() + static_cast<size_t>(i) * feature_dim,
                static_cast<size_t>(feature_dim)};
    }
    /// Per-class sample counts over the given indices.
    std::vector<std::int64_t> class_counts(std::span<const int> indices) const;
};

struct SynthConfig {
    ClassTaxonomy taxonomy;
    std::vector<int> counts;                 // per class
    std::vector<std::vector<double>> means;  // per class, length d
    double sigma = 1.0;                      // shared isotropic stddev
    std::uint64_t seed = 0;
};

/// Draws counts[c] samples from N(mean_c, sigma^2 I) per class, then shuffles
/// rows globally. The fresh dataset has all samples in the train split.
Dataset generate_synthetic(const SynthConfig& config);

/// Canonical 4-class fixture: benign pair B1/B2 and rare malignant pair
/// M1/M2 with overlapping isotropic Gaussians, 70/15/15 stratified split.
Dataset default_overlap_scenario(std::uint64_t seed);

/// Dataset CSV: header "f0,...,f{d-1},label"; label is a class name resolved
/// through the taxonomy.
Dataset load_csv(const std::string& path, const ClassTaxonomy& taxonomy);

void save_csv(const Dataset& dataset, const std::string& path);

/// Per-class proportions in each split land within +-1 sample of the
/// requested fractions. Fractions must be positive and sum to 1 (1e-9).
Dataset stratified_split(Dataset dataset, std::array<double, 3> fractions,
                         std::uint64_t seed);

}  // namespace riskcal
