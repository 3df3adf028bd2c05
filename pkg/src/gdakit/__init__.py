"""Gaussian discriminant analysis toolkit: LDA, QDA, naive Bayes, plug-in Bayes and friends."""

from .discriminant import (
    ClassModel,
    DiagonalGaussian,
    FittedClassifier,
    binary_delta,
    fit,
    lrt_classify,
    make_bayes,
    predict,
    score,
)
from .estimation import LabeledDataset
from .gaussian import GaussianParams
from .mixture import MixtureModel, em_fit

__version__ = "0.1.0"

__all__ = [
    "ClassModel",
    "DiagonalGaussian",
    "FittedClassifier",
    "GaussianParams",
    "LabeledDataset",
    "MixtureModel",
    "binary_delta",
    "em_fit",
    "fit",
    "lrt_classify",
    "make_bayes",
    "predict",
    "score",
]
