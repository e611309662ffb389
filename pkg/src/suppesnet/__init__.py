"""Progression models from cross-sectional binary data via probabilistic causation."""
from ._accel import NUMBA_ENABLED
from .caprese import ROOT, TreeModel, reconstruct_tree, shrinkage_scores
from .capri import ProgressionModel, Regularizer, hill_climb, reconstruct
from .dataset import DataError, GenotypeMatrix, consolidate, import_matrix
from .patterns import AND, NOT, OR, XOR, Hypothesis, Leaf, lift

__version__ = "0.1.0"

__all__ = [
    "AND", "NOT", "OR", "XOR", "DataError", "GenotypeMatrix", "Hypothesis", "Leaf",
    "NUMBA_ENABLED", "ProgressionModel", "ROOT", "Regularizer", "TreeModel", "consolidate",
    "hill_climb", "import_matrix", "lift", "reconstruct", "reconstruct_tree", "shrinkage_scores",
]
