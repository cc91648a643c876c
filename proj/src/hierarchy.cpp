#include "riskcal/hierarchy.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace riskcal {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Correct: return "correct";
        case ErrorKind::VisualAmbiguity: return "visual_ambiguity";
        case ErrorKind::TypeI: return "type1";
        case ErrorKind::TypeII: return "type2";
    }
    throw std::logic_error("unhandled ErrorKind");
}

int ClassTaxonomy::superclass_of(int c) const {
    if (c < 0 || c >= num_classes()) {
        throw std::invalid_argument("class index " + std::to_string(c) +
                                    " out of range [0, " +
                                    std::to_string(num_classes()) + ")");
    }
    return superclass[c];
}

int ClassTaxonomy::index_of(const std::string& name) const {
    for (int i = 0; i < num_classes(); ++i) {
        if (class_names[i] == name) return i;
    }
    return -1;
}

ClassTaxonomy make_taxonomy(std::vector<std::string> class_names,
                            std::vector<int> superclass) {
    if (class_names.size() < 2) {
        throw std::invalid_argument("taxonomy needs at least two classes");
    }
    if (superclass.size() != class_names.size()) {
        throw std::invalid_argument("superclass list has " +
                                    std::to_string(superclass.size()) +
                                    " entries for " +
                                    std::to_string(class_names.size()) + " classes");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : class_names) {
        if (name.empty()) throw std::invalid_argument("empty class name");
        if (name.find(',') != std::string::npos ||
            name.find('\n') != std::string::npos) {
            throw std::invalid_argument("class name '" + name +
                                        "' contains a CSV delimiter");
        }
        if (!seen.insert(name).second) {
            throw std::invalid_argument("duplicate class name '" + name + "'");
        }
    }
    bool has_benign = false;
    bool has_malignant = false;
    for (int s : superclass) {
        if (s != 0 && s != 1) {
            throw std::invalid_argument("superclass values must be 0 or 1");
        }
        (s == 0 ? has_benign : has_malignant) = true;
    }
    if (!has_benign || !has_malignant) {
        throw std::invalid_argument(
            "taxonomy must contain both superclasses; Type I/II errors are "
            "undefined otherwise");
    }
    return ClassTaxonomy{std::move(class_names), std::move(superclass)};
}

namespace {

// Benign block first, alphabetical within each superclass.
ClassTaxonomy make_preset(const std::string& name) {
    if (name == "brainmri") {
        return make_taxonomy({"no_tumor", "glioma", "meningioma", "pituitary"},
                             {0, 1, 1, 1});
    }
    if (name == "isic2018") {
        return make_taxonomy({"BKL", "DF", "NV", "VASC", "AKIEC", "BCC", "MEL"},
                             {0, 0, 0, 0, 1, 1, 1});
    }
    if (name == "breakhis") {
        return make_taxonomy({"adenosis", "fibroadenoma", "phyllodes_tumor",
                              "tubular_adenoma", "ductal_carcinoma",
                              "lobular_carcinoma", "mucinous_carcinoma",
                              "papillary_carcinoma"},
                             {0, 0, 0, 0, 1, 1, 1, 1});
    }
    if (name == "sicapv2") {
        return make_taxonomy({"NC", "G3", "G4", "G5"}, {0, 1, 1, 1});
    }
    throw std::invalid_argument("unknown taxonomy preset '" + name +
                                "' (available: brainmri, isic2018, breakhis, "
                                "sicapv2)");
}

}  // namespace

const std::vector<std::string>& taxonomy_preset_names() {
    static const std::vector<std::string> names = {"brainmri", "isic2018",
                                                   "breakhis", "sicapv2"};
    return names;
}

ClassTaxonomy taxonomy_preset(const std::string& name) {
    return make_preset(name);
}

ClassTaxonomy parse_taxonomy_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("taxonomy file is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "class,superclass") {
        throw std::invalid_argument(
            "taxonomy file must start with header 'class,superclass', got '" +
            line + "'");
    }
    std::vector<std::string> names;
    std::vector<int> superclass;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw std::invalid_argument("taxonomy row " + std::to_string(row) +
                                        " must have exactly two columns");
        }
        const std::string name = line.substr(0, comma);
        const std::string flag = line.substr(comma + 1);
        if (flag != "0" && flag != "1") {
            throw std::invalid_argument("taxonomy row " + std::to_string(row) +
                                        ": superclass must be 0 or 1, got '" +
                                        flag + "'");
        }
        names.push_back(name);
        superclass.push_back(flag == "1" ? 1 : 0);
    }
    return make_taxonomy(std::move(names), std::move(superclass));
}

ClassTaxonomy load_taxonomy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open taxonomy file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_taxonomy_csv(buffer.str());
}

std::string taxonomy_to_csv(const ClassTaxonomy& taxonomy) {
    std::string out = "class,superclass\n";
    for (int i = 0; i < taxonomy.num_classes(); ++i) {
        out += taxonomy.class_names[i];
        out += ',';
        out += taxonomy.superclass[i] == 1 ? '1' : '0';
        out += '\n';
    }
    return out;
}

void save_taxonomy_file(const ClassTaxonomy& taxonomy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write taxonomy file '" + path + "'");
    out << taxonomy_to_csv(taxonomy);
}

ErrorKind classify_confusion(const ClassTaxonomy& taxonomy, int y, int y_hat) {
    const int sy = taxonomy.superclass_of(y);
    const int sp = taxonomy.superclass_of(y_hat);
    if (y == y_hat) return ErrorKind::Correct;
    if (sy == sp) return ErrorKind::VisualAmbiguity;
    return sy == 0 ? ErrorKind::TypeI : ErrorKind::TypeII;
}

SeverityMatrix build_severity_matrix(const ClassTaxonomy& taxonomy,
                                     double alpha, double beta) {
    if (!(alpha >= 1.0)) {
        throw std::invalid_argument("alpha must be >= 1, got " +
                                    std::to_string(alpha));
    }
    if (!(beta >= alpha)) {
        throw std::invalid_argument("beta must be >= alpha, got alpha=" +
                                    std::to_string(alpha) +
                                    " beta=" + std::to_string(beta));
    }
    const int k = taxonomy.num_classes();
    SeverityMatrix m;
    m.k = k;
    m.alpha = alpha;
    m.beta = beta;
    m.entries.resize(static_cast<size_t>(k) * k);
    for (int y = 0; y < k; ++y) {
        for (int pred = 0; pred < k; ++pred) {
            const int sy = taxonomy.superclass[y];
            const int sp = taxonomy.superclass[pred];
            double value = 1.0;
            if (sy == 0 && sp == 1) value = alpha;
            if (sy == 1 && sp == 0) value = beta;
            m.entries[static_cast<size_t>(y) * k + pred] = value;
        }
    }
    return m;
}

}  // namespace riskcal
