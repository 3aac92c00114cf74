"""Lepto-variance and macro-variance of a numeric series via regression trees."""

from .dataset import ColumnStats, DataError, Dataset, correlations, describe, load_csv, select, write_csv
from .lepto import (DecompositionProfile, FeatureSetResult, decompose, feature_set_analysis,
                    lepto_variance, macro_variance, total_variance)
from .tree import (Node, SplitCandidate, Tree, average_leaf_depth, best_split, best_split_for_feature,
                   fit, fit_self, node_stats, predict)

__version__ = "0.1.0"
