"""Risk-calibrated classification: asymmetric severity-weighted losses,
a desk-scale trainer and the three-tier error-taxonomy evaluator."""

from ._core import (
    ClassTaxonomy,
    Classifier,
    ConfusionMatrix,
    Dataset,
    EpochRecord,
    ErrorKind,
    LossConfig,
    LossResult,
    SeverityMatrix,
    SplitIndices,
    SynthConfig,
    TaxonomyReport,
    ablation_grid,
    accuracy,
    build_severity_matrix,
    ce_loss,
    cer,
    class_weights_from_counts,
    classify_confusion,
    confusion_matrix,
    default_overlap_scenario,
    evaluate,
    f1_macro,
    focal_loss,
    format_cer_improvement,
    generate_synthetic,
    label_smoothing_loss,
    load_csv,
    load_taxonomy_file,
    loss_ce,
    loss_focal,
    loss_label_smoothing,
    loss_rcl,
    loss_wce,
    make_taxonomy,
    parse_taxonomy_csv,
    predict,
    rcl_loss,
    run_ablation_json,
    run_comparison_json,
    save_csv,
    softmax,
    stratified_split,
    taxonomy_preset,
    taxonomy_preset_names,
    taxonomy_report,
    train,
    wce_loss,
)

__all__ = [name for name in dir() if not name.startswith("_")]
