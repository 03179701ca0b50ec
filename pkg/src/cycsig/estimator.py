"""Scikit-learn style estimator wrapping the signature pipeline.

fit() builds the cubical comparison space over a lifted trajectory;
transform() maps segments (blocks of lifted samples) to canonical signature
subspace keys, and predict() to their cycling ranks.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .cubical import GridParams, build_space
from .signatures import signature_for_arrays
from .systems import LiftedSeries
from .validation import check_segment_list, check_utb_array

__all__ = ["CyclingSignatureTransformer"]


class CyclingSignatureTransformer(TransformerMixin, BaseEstimator):
    """Assigns signature subspaces to trajectory segments.

    Parameters
    ----------
    box_size : spatial box size of the cover.
    sphere_divisions : subdivision count of the tangent sphere factor.
    radius : evaluation radius; defaults to the box size (the largest radius
        for which the chain map into the cover is defined).
    metric_scale : tangent weight of the bundle metric; defaults to
        box_size * sphere_divisions.
    """

    def __init__(
        self,
        box_size: float = 1.0,
        sphere_divisions: int = 1,
        radius: float | None = None,
        metric_scale: float | None = None,
    ):
        self.box_size = box_size
        self.sphere_divisions = sphere_divisions
        self.radius = radius
        self.metric_scale = metric_scale

    def fit(self, X, y=None):
        """Build the comparison space over a (N, 2d) lifted trajectory."""
        points, tangents = check_utb_array(X)
        grid = GridParams(self.box_size, self.sphere_divisions, points.shape[1])
        lifted = LiftedSeries(points, tangents)
        self.space_ = build_space(lifted, grid)
        self.betti_ = self.space_.b1
        self.n_boxes_ = self.space_.n_boxes
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "space_"):
            raise NotFittedError("this transformer is not fitted yet; call fit first")

    def _effective_radius(self) -> float:
        return self.radius if self.radius is not None else self.box_size

    def transform(self, X) -> np.ndarray:
        """Canonical subspace key per segment (object array of strings)."""
        return np.array([rec.key for rec in self.signature_records(X)], dtype=object)

    def predict(self, X) -> np.ndarray:
        """Cycling rank per segment."""
        return np.array([rec.rank for rec in self.signature_records(X)], dtype=np.int64)

    def signature_records(self, X):
        """Full signature records for segments given as (n, L, 2d) or a list of blocks."""
        self._check_fitted()
        radius = self._effective_radius()
        out = []
        for points, tangents in check_segment_list(X):
            if points.shape[1] != self.space_.grid.dim:
                raise ValueError("segment dimension does not match the fitted space")
            out.append(
                signature_for_arrays(points, tangents, self.space_, radius, self.metric_scale)
            )
        return out
