#include "riskcal/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "riskcal/rng.hpp"

namespace riskcal {

std::vector<std::int64_t> Dataset::class_counts(std::span<const int> indices) const {
    std::vector<std::int64_t> counts(taxonomy.num_classes(), 0);
    for (int i : indices) ++counts[labels[i]];
    return counts;
}

namespace {

void validate_synth_config(const SynthConfig& config) {
    const int k = config.taxonomy.num_classes();
    if (!(config.sigma > 0.0)) {
        throw std::invalid_argument("sigma must be positive");
    }
    if (config.counts.empty() || static_cast<int>(config.counts.size()) != k) {
        throw std::invalid_argument("counts must list one entry per class");
    }
    for (int c : config.counts) {
        if (c < 1) throw std::invalid_argument("per-class counts must be >= 1");
    }
    if (static_cast<int>(config.means.size()) != k) {
        throw std::invalid_argument("means must list one vector per class");
    }
    const size_t d = config.means.front().size();
    if (d == 0) throw std::invalid_argument("feature dimension must be >= 1");
    for (const auto& mean : config.means) {
        if (mean.size() != d) {
            throw std::invalid_argument("all class means must share one dimension");
        }
    }
}

}  // namespace

Dataset generate_synthetic(const SynthConfig& config) {
    validate_synth_config(config);
    const int k = config.taxonomy.num_classes();
    const int d = static_cast<int>(config.means.front().size());
    const int n = std::accumulate(config.counts.begin(), config.counts.end(), 0);

    Rng rng(config.seed);
    std::vector<double> features(static_cast<size_t>(n) * d);
    std::vector<int> labels(n);
    size_t row = 0;
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < config.counts[c]; ++i, ++row) {
            for (int j = 0; j < d; ++j) {
                features[row * d + j] = config.means[c][j] + config.sigma * rng.normal();
            }
            labels[row] = c;
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    Dataset dataset;
    dataset.feature_dim = d;
    dataset.taxonomy = config.taxonomy;
    dataset.features.resize(features.size());
    dataset.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const int src = order[i];
        for (int j = 0; j < d; ++j) {
            dataset.features[static_cast<size_t>(i) * d + j] =
                features[static_cast<size_t>(src) * d + j];
        }
        dataset.labels[i] = labels[src];
    }
    dataset.split.train.resize(n);
    std::iota(dataset.split.train.begin(), dataset.split.train.end(), 0);
    return dataset;
}

Dataset default_overlap_scenario(std::uint64_t seed) {
    SynthConfig config;
    config.taxonomy = make_taxonomy({"B1", "B2", "M1", "M2"}, {0, 0, 1, 1});
    config.counts = {400, 400, 60, 60};
    config.means = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}, {1.5, 1.0}};
    config.sigma = 0.6;
    config.seed = seed;
    return stratified_split(generate_synthetic(config), {0.70, 0.15, 0.15}, seed);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_feature(const std::string& field, int row, int column) {
    if (field.empty()) {
        throw std::invalid_argument("row " + std::to_string(row) + ", column " +
                                    std::to_string(column) + ": empty feature");
    }
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || !std::isfinite(value)) {
        throw std::invalid_argument("row " + std::to_string(row) + ", column " +
                                    std::to_string(column) +
                                    ": non-numeric feature '" + field + "'");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const ClassTaxonomy& taxonomy) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("dataset file '" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_fields(line);
    if (header.size() < 2 || header.back() != "label") {
        throw std::invalid_argument(
            "dataset header must be 'f0,...,f{d-1},label'");
    }
    const int d = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < d; ++j) {
        if (header[j] != "f" + std::to_string(j)) {
            throw std::invalid_argument("dataset header column " +
                                        std::to_string(j) + " must be 'f" +
                                        std::to_string(j) + "'");
        }
    }

    Dataset dataset;
    dataset.feature_dim = d;
    dataset.taxonomy = taxonomy;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != d + 1) {
            throw std::invalid_argument(
                "row " + std::to_string(row) + " has " +
                std::to_string(fields.size()) + " columns, expected " +
                std::to_string(d + 1));
        }
        for (int j = 0; j < d; ++j) {
            dataset.features.push_back(parse_feature(fields[j], row, j));
        }
        const int label = taxonomy.index_of(fields[d]);
        if (label < 0) {
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": unknown label '" + fields[d] + "'");
        }
        dataset.labels.push_back(label);
    }
    if (dataset.labels.empty()) {
        throw std::invalid_argument("dataset file '" + path + "' has no data rows");
    }
    dataset.split.train.resize(dataset.labels.size());
    std::iota(dataset.split.train.begin(), dataset.split.train.end(), 0);
    return dataset;
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file '" + path + "'");
    for (int j = 0; j < dataset.feature_dim; ++j) out << 'f' << j << ',';
    out << "label\n";
    char buffer[40];
    for (int i = 0; i < dataset.num_samples(); ++i) {
        for (int j = 0; j < dataset.feature_dim; ++j) {
            std::snprintf(buffer, sizeof(buffer), "%.17g",
                          dataset.features[static_cast<size_t>(i) * dataset.feature_dim + j]);
            out << buffer << ',';
        }
        out << dataset.taxonomy.class_names[dataset.labels[i]] << '\n';
    }
}

Dataset stratified_split(Dataset dataset, std::array<double, 3> fractions,
                         std::uint64_t seed) {
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw std::invalid_argument("split fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must sum to 1");
    }

    const int k = dataset.taxonomy.num_classes();
    std::vector<std::vector<int>> by_class(k);
    for (int i = 0; i < dataset.num_samples(); ++i) {
        by_class[dataset.labels[i]].push_back(i);
    }

    Rng rng(seed);
    SplitIndices split;
    for (int c = 0; c < k; ++c) {
        auto& indices = by_class[c];
        if (indices.size() < 3) {
            throw std::invalid_argument("class '" + dataset.taxonomy.class_names[c] +
                                        "' has " + std::to_string(indices.size()) +
                                        " samples, fewer than the 3 splits");
        }
        rng.shuffle(indices);

        // Largest-remainder allocation keeps every split within one sample
        // of n_c * fraction.
        const auto n = static_cast<double>(indices.size());
        int alloc[3];
        double remainder[3];
        int assigned = 0;
        for (int s = 0; s < 3; ++s) {
            const double target = n * fractions[s];
            alloc[s] = static_cast<int>(std::floor(target));
            remainder[s] = target - alloc[s];
            assigned += alloc[s];
        }
        int leftover = static_cast<int>(indices.size()) - assigned;
        while (leftover-- > 0) {
            int best = 0;
            for (int s = 1; s < 3; ++s) {
                if (remainder[s] > remainder[best]) best = s;
            }
            ++alloc[best];
            remainder[best] = -1.0;
        }
        if (alloc[0] < 1) {
            throw std::invalid_argument("class '" + dataset.taxonomy.class_names[c] +
                                        "' receives no training samples under "
                                        "these fractions");
        }

        size_t cursor = 0;
        std::vector<int>* buckets[3] = {&split.train, &split.val, &split.test};
        for (int s = 0; s < 3; ++s) {
            for (int i = 0; i < alloc[s]; ++i) buckets[s]->push_back(indices[cursor++]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    dataset.split = std::move(split);
    return dataset;
}

}  // namespace riskcal
