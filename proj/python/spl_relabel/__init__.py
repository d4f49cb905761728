"""Python bindings for the spl-relabel C++ library."""

from ._spl import (
    ConfusionMatrix,
    LabelSpace,
    LinearModel,
    MlpModel,
    SplError,
    assign_spl_full,
    average_precision,
    benchmark_config,
    build_confusion,
    build_label_space,
    build_true_vs_weak,
    compare_strategies,
    corpus_spec_defaults,
    dump_json,
    generate_web_corpus,
    load_records,
    make_prototypes,
    mean_average_precision,
    noise_ratio,
    records_from_jsonl,
    records_to_jsonl,
    relabel,
    run_experiment,
    save_records,
    scr_curve,
    sweep_scr,
    top_k_accuracy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
