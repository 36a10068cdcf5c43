"""Exact verification toolkit for the evaluation map of the affine super Yangian."""

from .foundation import RankData, RankError, Scalar, scalar
from .pbw import AlgebraElement
from .tails import CompletionElement

__all__ = ["RankData", "RankError", "Scalar", "scalar", "AlgebraElement", "CompletionElement"]
