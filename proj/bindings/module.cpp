#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "riskcal/experiment.hpp"
#include "riskcal/serialize.hpp"

namespace py = pybind11;
using namespace riskcal;

namespace {

TrainConfig make_train_config(double learning_rate, int batch_size, int epochs,
                              double weight_decay, const std::string& schedule,
                              std::uint64_t seed) {
    TrainConfig config;
    config.learning_rate = learning_rate;
    config.batch_size = batch_size;
    config.epochs = epochs;
    config.weight_decay = weight_decay;
    config.schedule = schedule_from_string(schedule);
    config.seed = seed;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Risk-calibrated classification losses, trainer and metrics";

    py::enum_<ErrorKind>(m, "ErrorKind")
        .value("Correct", ErrorKind::Correct)
        .value("VisualAmbiguity", ErrorKind::VisualAmbiguity)
        .value("TypeI", ErrorKind::TypeI)
        .value("TypeII", ErrorKind::TypeII);

    py::class_<ClassTaxonomy>(m, "ClassTaxonomy")
        .def_readonly("class_names", &ClassTaxonomy::class_names)
        .def_readonly("superclass", &ClassTaxonomy::superclass)
        .def("num_classes", &ClassTaxonomy::num_classes)
        .def("superclass_of", &ClassTaxonomy::superclass_of)
        .def("index_of", &ClassTaxonomy::index_of);

    m.def("make_taxonomy", &make_taxonomy, py::arg("class_names"),
          py::arg("superclass"));
    m.def("taxonomy_preset", &taxonomy_preset, py::arg("name"));
    m.def("taxonomy_preset_names",
          []() { return taxonomy_preset_names(); });
    m.def("parse_taxonomy_csv", &parse_taxonomy_csv, py::arg("text"));
    m.def("load_taxonomy_file", &load_taxonomy_file, py::arg("path"));
    m.def("classify_confusion", &classify_confusion, py::arg("taxonomy"),
          py::arg("y"), py::arg("y_hat"));

    py::class_<SeverityMatrix>(m, "SeverityMatrix")
        .def_readonly("k", &SeverityMatrix::k)
        .def_readonly("alpha", &SeverityMatrix::alpha)
        .def_readonly("beta", &SeverityMatrix::beta)
        .def_readonly("entries", &SeverityMatrix::entries)
        .def("at", &SeverityMatrix::at, py::arg("y"), py::arg("pred"));

    m.def("build_severity_matrix", &build_severity_matrix, py::arg("taxonomy"),
          py::arg("alpha"), py::arg("beta"));

    py::class_<LossResult>(m, "LossResult")
        .def_readonly("value", &LossResult::value)
        .def_readonly("grad_logits", &LossResult::grad_logits);

    m.def("softmax",
          [](const std::vector<double>& logits) { return softmax(logits); },
          py::arg("logits"));
    m.def("ce_loss",
          [](const std::vector<double>& logits, int y) { return ce_loss(logits, y); },
          py::arg("logits"), py::arg("y"));
    m.def("wce_loss",
          [](const std::vector<double>& logits, int y,
             const std::vector<double>& weights) {
              return wce_loss(logits, y, weights);
          },
          py::arg("logits"), py::arg("y"), py::arg("weights"));
    m.def("focal_loss",
          [](const std::vector<double>& logits, int y, double gamma, double alpha_f) {
              return focal_loss(logits, y, gamma, alpha_f);
          },
          py::arg("logits"), py::arg("y"), py::arg("gamma") = 2.0,
          py::arg("alpha_f") = 1.0);
    m.def("label_smoothing_loss",
          [](const std::vector<double>& logits, int y, double epsilon) {
              return label_smoothing_loss(logits, y, epsilon);
          },
          py::arg("logits"), py::arg("y"), py::arg("epsilon") = 0.1);
    m.def("rcl_loss",
          [](const std::vector<double>& logits, int y, const SeverityMatrix& severity) {
              return rcl_loss(logits, y, severity);
          },
          py::arg("logits"), py::arg("y"), py::arg("severity"));
    m.def("class_weights_from_counts",
          [](const std::vector<std::int64_t>& counts) {
              return class_weights_from_counts(counts);
          },
          py::arg("counts"));

    py::class_<LossConfig>(m, "LossConfig");
    m.def("loss_ce", []() { return LossConfig{}; });
    m.def("loss_wce",
          [](const std::string& weights_mode) {
              LossConfig config;
              config.kind = LossKind::WCE;
              if (weights_mode == "uniform") {
                  config.weights_mode = WeightsMode::Uniform;
              } else if (weights_mode == "inverse_frequency") {
                  config.weights_mode = WeightsMode::InverseFrequency;
              } else {
                  throw std::invalid_argument("unknown weights_mode '" +
                                              weights_mode + "'");
              }
              return config;
          },
          py::arg("weights_mode") = "inverse_frequency");
    m.def("loss_focal",
          [](double gamma, double alpha_f) {
              LossConfig config;
              config.kind = LossKind::Focal;
              config.gamma = gamma;
              config.alpha_f = alpha_f;
              return config;
          },
          py::arg("gamma") = 2.0, py::arg("alpha_f") = 1.0);
    m.def("loss_label_smoothing",
          [](double epsilon) {
              LossConfig config;
              config.kind = LossKind::LabelSmoothing;
              config.epsilon = epsilon;
              return config;
          },
          py::arg("epsilon") = 0.1);
    m.def("loss_rcl",
          [](double alpha, double beta) {
              LossConfig config;
              config.kind = LossKind::RCL;
              config.alpha = alpha;
              config.beta = beta;
              return config;
          },
          py::arg("alpha"), py::arg("beta"));

    py::class_<SplitIndices>(m, "SplitIndices")
        .def_readonly("train", &SplitIndices::train)
        .def_readonly("val", &SplitIndices::val)
        .def_readonly("test", &SplitIndices::test);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("feature_dim", &Dataset::feature_dim)
        .def_readonly("features", &Dataset::features)
        .def_readonly("labels", &Dataset::labels)
        .def_readonly("taxonomy", &Dataset::taxonomy)
        .def_readonly("split", &Dataset::split)
        .def("num_samples", &Dataset::num_samples);

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("taxonomy", &SynthConfig::taxonomy)
        .def_readwrite("counts", &SynthConfig::counts)
        .def_readwrite("means", &SynthConfig::means)
        .def_readwrite("sigma", &SynthConfig::sigma)
        .def_readwrite("seed", &SynthConfig::seed);

    m.def("generate_synthetic", &generate_synthetic, py::arg("config"));
    m.def("default_overlap_scenario", &default_overlap_scenario, py::arg("seed"));
    m.def("load_csv", &load_csv, py::arg("path"), py::arg("taxonomy"));
    m.def("save_csv", &save_csv, py::arg("dataset"), py::arg("path"));
    m.def("stratified_split",
          [](const Dataset& dataset, double train, double val, double test,
             std::uint64_t seed) {
              return stratified_split(dataset, {train, val, test}, seed);
          },
          py::arg("dataset"), py::arg("train"), py::arg("val"), py::arg("test"),
          py::arg("seed"));

    py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
        .def_readonly("k", &ConfusionMatrix::k)
        .def_readonly("counts", &ConfusionMatrix::counts)
        .def("at", static_cast<std::int64_t (ConfusionMatrix::*)(int, int) const>(
                       &ConfusionMatrix::at),
             py::arg("y"), py::arg("pred"))
        .def("total", &ConfusionMatrix::total);

    m.def("confusion_matrix",
          [](const std::vector<int>& truth, const std::vector<int>& pred, int k) {
              return confusion_matrix(truth, pred, k);
          },
          py::arg("true_labels"), py::arg("predicted_labels"), py::arg("k"));
    m.def("cer", &cer, py::arg("cm"), py::arg("taxonomy"));
    m.def("f1_macro", &f1_macro, py::arg("cm"));
    m.def("accuracy", &accuracy, py::arg("cm"));

    py::class_<TaxonomyReport>(m, "TaxonomyReport")
        .def_readonly("correct_count", &TaxonomyReport::correct_count)
        .def_readonly("visual_ambiguity_count",
                      &TaxonomyReport::visual_ambiguity_count)
        .def_readonly("type1_count", &TaxonomyReport::type1_count)
        .def_readonly("type2_count", &TaxonomyReport::type2_count)
        .def_readonly("n_benign", &TaxonomyReport::n_benign)
        .def_readonly("n_malignant", &TaxonomyReport::n_malignant)
        .def_readonly("cer", &TaxonomyReport::cer)
        .def_readonly("f1_macro", &TaxonomyReport::f1_macro)
        .def_readonly("accuracy", &TaxonomyReport::accuracy)
        .def_readonly("precision", &TaxonomyReport::precision)
        .def_readonly("recall", &TaxonomyReport::recall);

    m.def("taxonomy_report", &taxonomy_report, py::arg("cm"), py::arg("taxonomy"));

    py::class_<Classifier>(m, "Classifier")
        .def_readonly("input_dim", &Classifier::input_dim)
        .def_readonly("hidden_dim", &Classifier::hidden_dim)
        .def_readonly("num_classes", &Classifier::num_classes)
        .def_readonly("params", &Classifier::params)
        .def("forward",
             [](const Classifier& model, const std::vector<double>& x) {
                 return model.forward(x);
             },
             py::arg("x"));

    py::class_<EpochRecord>(m, "EpochRecord")
        .def_readonly("train_loss", &EpochRecord::train_loss)
        .def_readonly("val_accuracy", &EpochRecord::val_accuracy)
        .def_readonly("val_cer", &EpochRecord::val_cer)
        .def_readonly("learning_rate", &EpochRecord::learning_rate);

    m.def("train",
          [](const Dataset& dataset, const LossConfig& loss, int epochs,
             std::uint64_t seed, double learning_rate, int batch_size,
             double weight_decay, const std::string& schedule,
             const std::string& architecture, int hidden_dim) {
              ModelConfig model_config;
              model_config.architecture = architecture_from_string(architecture);
              model_config.hidden_dim = hidden_dim;
              TrainConfig config = make_train_config(
                  learning_rate, batch_size, epochs, weight_decay, schedule, seed);
              config.loss = resolve_loss(loss, dataset.taxonomy,
                                         dataset.class_counts(dataset.split.train));
              auto [model, history] = train(dataset, model_config, config);
              return std::make_pair(std::move(model), history.epochs);
          },
          py::arg("dataset"), py::arg("loss"), py::arg("epochs"), py::arg("seed"),
          py::arg("learning_rate") = 1e-4, py::arg("batch_size") = 32,
          py::arg("weight_decay") = 0.01, py::arg("schedule") = "cosine",
          py::arg("architecture") = "linear", py::arg("hidden_dim") = 16);

    m.def("predict",
          [](const Classifier& model, const std::vector<double>& features,
             int num_rows) { return predict(model, features, num_rows); },
          py::arg("model"), py::arg("features_rowmajor"), py::arg("num_rows"));

    m.def("evaluate",
          [](const Classifier& model, const Dataset& dataset,
             const std::string& split) {
              const std::vector<int>* indices = &dataset.split.test;
              if (split == "train") indices = &dataset.split.train;
              else if (split == "val") indices = &dataset.split.val;
              else if (split != "test") {
                  throw std::invalid_argument("split must be train, val or test");
              }
              return taxonomy_report(confusion_on_split(model, dataset, *indices),
                                     dataset.taxonomy);
          },
          py::arg("model"), py::arg("dataset"), py::arg("split") = "test");

    m.def("ablation_grid", []() {
        std::vector<std::tuple<std::string, double, double>> grid;
        for (const auto& entry : ablation_grid()) {
            grid.emplace_back(entry.name, entry.alpha, entry.beta);
        }
        return grid;
    });
    m.def("format_cer_improvement", &format_cer_improvement,
          py::arg("baseline_cer"), py::arg("cer"));
    m.def("run_comparison_json",
          [](const std::string& spec_json) {
              const ExperimentSpec spec =
                  experiment_spec_from_json(nlohmann::json::parse(spec_json));
              return comparison_to_json(run_comparison(spec)).dump(2);
          },
          py::arg("spec_json"));
    m.def("run_ablation_json",
          [](const std::string& spec_json) {
              const ExperimentSpec spec =
                  experiment_spec_from_json(nlohmann::json::parse(spec_json));
              return comparison_to_json(run_ablation(spec)).dump(2);
          },
          py::arg("spec_json"));
}
