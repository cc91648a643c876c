#pragma once

#include <string>
#include <vector>

namespace riskcal {

/// Outcome of comparing a prediction against the ground truth under a
/// binary benign/malignant superclass split.
enum class ErrorKind { Correct, VisualAmbiguity, TypeI, TypeII };

const char* to_string(ErrorKind kind);

/// Fine-grained class list plus its binary superclass map.
/// superclass[c] == 0 means benign/non-critical, 1 means malignant/critical.
struct ClassTaxonomy {
    std::vector<std::string> class_names;
    std::vector<int> superclass;

    int num_classes() const { return static_cast<int>(class_names.size()); }
    int superclass_of(int c) const;
    /// Index of a class name, -1 if absent.
    int index_of(const std::string& name) const;
};

/// Validates and builds a taxonomy. Throws std::invalid_argument on
/// duplicate/empty names, size mismatch, superclass values outside {0,1},
/// fewer than two classes, or a missing superclass.
ClassTaxonomy make_taxonomy(std::vector<std::string> class_names,
                            std::vector<int> superclass);

/// Names of the built-in dataset presets.
const std::vector<std::string>& taxonomy_preset_names();

/// Built-in taxonomy for one of the preset names. Classes are ordered
/// benign block first, alphabetically within each superclass.
ClassTaxonomy taxonomy_preset(const std::string& name);

/// Parses taxonomy CSV text (header "class,superclass", one row per class;
/// row order defines the class index).
ClassTaxonomy parse_taxonomy_csv(const std::string& text);

ClassTaxonomy load_taxonomy_file(const std::string& path);

std::string taxonomy_to_csv(const ClassTaxonomy& taxonomy);

void save_taxonomy_file(const ClassTaxonomy& taxonomy, const std::string& path);

ErrorKind classify_confusion(const ClassTaxonomy& taxonomy, int y, int y_hat);

/// K x K penalty multipliers with the block structure
///   same superclass        -> 1 (including the diagonal)
///   benign -> malignant    -> alpha   (Type I quadrant)
///   malignant -> benign    -> beta    (Type II / fatal quadrant)
struct SeverityMatrix {
    int k = 0;
    double alpha = 1.0;
    double beta = 1.0;
    std::vector<double> entries;  // row-major, rows = true class

    double at(int y, int pred) const { return entries[static_cast<size_t>(y) * k + pred]; }
};

/// Requires 1 <= alpha <= beta.
SeverityMatrix build_severity_matrix(const ClassTaxonomy& taxonomy,
                                     double alpha, double beta);

}  // namespace riskcal
