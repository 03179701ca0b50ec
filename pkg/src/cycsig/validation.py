"""Input validation helpers for the estimator API."""

from __future__ import annotations

import numpy as np

__all__ = ["check_utb_array", "check_segment_list"]


def check_utb_array(X, *, normalize: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Validate a (N, 2d) array of concatenated points and tangents.

    Returns (points, tangents) with tangents normalized to unit length.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2d array, got shape {X.shape}")
    if X.shape[1] % 2 or X.shape[1] == 0:
        raise ValueError("columns must be state coordinates followed by tangent coordinates")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains non-finite values")
    d = X.shape[1] // 2
    points = X[:, :d].copy()
    tangents = X[:, d:].copy()
    norms = np.linalg.norm(tangents, axis=1)
    if np.any(norms == 0):
        raise ValueError(f"zero tangent vector at row {int(np.nonzero(norms == 0)[0][0])}")
    if normalize:
        tangents /= norms[:, None]
    elif np.any(np.abs(norms - 1) > 1e-12):
        raise ValueError("tangents must be unit vectors")
    return points, tangents


def check_segment_list(X) -> list[tuple[np.ndarray, np.ndarray]]:
    """Validate segments given as a 3d array or a list of (L_i, 2d) arrays."""
    arr = np.asarray(X, dtype=object) if isinstance(X, (list, tuple)) else np.asarray(X)
    if isinstance(X, np.ndarray) and X.ndim == 3:
        return [check_utb_array(X[i]) for i in range(len(X))]
    return [check_utb_array(np.asarray(seg, dtype=np.float64)) for seg in X]
