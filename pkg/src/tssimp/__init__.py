"""Time-series simplification toolkit.

Piecewise-linear simplification of classification series (RDP, VW,
bottom-up, and an exact DP optimizer) behind one normalized complexity
parameter, plus the machinery to measure how loyal a classifier stays to
its own predictions as series are simplified: stratified sampling,
loyalty/kappa sweeps, AUC and threshold reports, dataset characterization,
per-class prototypes, and a small HTTP API for interactive exploration.
"""

from .characterize import (DatasetCharacteristics, acf, adf_test, approx_entropy,
                           characterize_dataset, is_seasonal)
from .classifiers import (Classifier, PredictionKey, dtw_distance, fit_knn,
                          fit_logreg, load_external_predictions)
from .data import (Dataset, LabeledInstance, SamplePool, TimeSeries, load_dataset,
                   parse_ucr_tsv, stratified_sample, znormalize)
from .errors import ConfigError, DataError
from .evaluation import (CurvePoint, EvaluationCurve, auc, cohen_kappa,
                         complexity_at_loyalty, complexity_of,
                         min_alpha_for_loyalty, sweep)
from .prototypes import PrototypeSet, class_prototypes, export_prompt_bundle, kmedoids
from .simplifiers import (AlgorithmId, ComplexityParam, Simplification, bottom_up,
                          normalize_param, optimal_simplify, rdp, reconstruct,
                          simplify, simplify_grid, vw)
from .synthetic import make_dataset, write_ucr_pair

__version__ = "0.1.0"

__all__ = [
    "AlgorithmId", "Classifier", "ComplexityParam", "ConfigError", "CurvePoint",
    "DataError", "Dataset", "DatasetCharacteristics", "EvaluationCurve",
    "LabeledInstance", "PredictionKey", "PrototypeSet", "SamplePool",
    "Simplification", "TimeSeries", "acf", "adf_test", "approx_entropy", "auc",
    "bottom_up", "characterize_dataset", "class_prototypes", "cohen_kappa",
    "complexity_at_loyalty", "complexity_of", "dtw_distance",
    "export_prompt_bundle", "fit_knn", "fit_logreg", "is_seasonal", "kmedoids",
    "load_dataset", "load_external_predictions", "make_dataset",
    "min_alpha_for_loyalty", "normalize_param", "optimal_simplify",
    "parse_ucr_tsv", "rdp", "reconstruct", "simplify", "simplify_grid",
    "stratified_sample", "sweep", "vw", "write_ucr_pair", "znormalize",
]
