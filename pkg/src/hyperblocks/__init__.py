"""Hyper-block discovery, visualization support, and classification."""

from .dataset import (Dataset, DatasetError, NormalizedDataset, Schema,
                      WBC_PRIORITY, WBC_SCHEMA, load_csv, load_wbc, normalize,
                      stratified_folds)
from .hyperblock import (GeometryError, HyperBlock, HyperCube, block_from_bounds,
                         dominant_class, envelope, hypercube_from_seed, impurity)
from .mhyper import (HBModel, MHyperConfig, dedup, discover, merge_dominant,
                     merge_pure, seeded_blocks)
from .hyperclassifier import (Classification, ClassifierError, CoverageReport,
                              HyperModel, LearnConfig, REFUSED, classify,
                              classify_batch, classify_with_small_hb_refusal,
                              coverage_report, learn, resolution_report)
from .dtree import (ComplexityReport, DecisionTree, TreeConfig, TreeError,
                    TreeNode, branch_to_hb, complexity, hb_to_branch, id3_train,
                    parse_branch, render_branch, tree_to_hbs)
from .analytics import (ConfusionMatrix, EvaluationReport, HeatmapReport,
                        HyperLearner, ID3Learner, PairResult, QuantileReport,
                        RuleEvaluation, ThresholdRule, best_pair_search,
                        cross_validate, evaluate_rule, nonoverlap_heatmap,
                        quantile_histogram, simple_rule_search)
from .linguistic import LinguisticDescription, LinguisticError, describe

__version__ = "1.0.0"

__all__ = [
    "Classification", "ClassifierError", "ComplexityReport", "ConfusionMatrix",
    "CoverageReport", "Dataset", "DatasetError", "DecisionTree",
    "EvaluationReport", "GeometryError", "HBModel", "HeatmapReport",
    "HyperBlock", "HyperCube", "HyperLearner", "HyperModel", "ID3Learner",
    "LearnConfig", "LinguisticDescription", "LinguisticError", "MHyperConfig",
    "NormalizedDataset", "PairResult", "QuantileReport", "REFUSED",
    "RuleEvaluation", "Schema", "ThresholdRule", "TreeConfig", "TreeError",
    "TreeNode", "WBC_PRIORITY", "WBC_SCHEMA", "best_pair_search",
    "block_from_bounds", "branch_to_hb", "classify", "classify_batch",
    "classify_with_small_hb_refusal", "complexity", "coverage_report",
    "cross_validate", "dedup", "describe", "discover", "dominant_class",
    "envelope", "evaluate_rule", "hb_to_branch", "hypercube_from_seed",
    "id3_train", "impurity",
    "learn", "load_csv", "load_wbc", "merge_dominant", "merge_pure",
    "nonoverlap_heatmap", "normalize", "parse_branch", "quantile_histogram",
    "render_branch", "resolution_report", "seeded_blocks", "simple_rule_search",
    "stratified_folds", "tree_to_hbs",
]
