"""Change-point detection in the community structure of multivariate time series.

The heavy lifting lives in the compiled :mod:`ncpd._core` extension; this
package re-exports it and adds a dict-returning :func:`detect` wrapper.
"""
from __future__ import annotations

import json
from typing import Any

from ._core import (
    __version__,
    centroid_expand,
    correlation,
    embed,
    gamma,
    generate,
    kmeans,
    laplacian,
    load_matrix,
    permutation_resample,
    regime_covariance,
    spectral_clustering,
    stationary_indices,
    stationary_resample,
)
from . import _core

__all__ = [
    "__version__",
    "centroid_expand",
    "correlation",
    "detect",
    "embed",
    "gamma",
    "generate",
    "kmeans",
    "laplacian",
    "load_matrix",
    "permutation_resample",
    "regime_covariance",
    "spectral_clustering",
    "stationary_indices",
    "stationary_resample",
]


def detect(y: Any, **kwargs: Any) -> dict:
    """Run the full binary-segmentation search on a T x p array.

    Keyword arguments mirror the CLI flags: ``k``, ``n_min``, ``alpha``,
    ``resamples``, ``block_len``, ``block_frac``, ``mode`` ("stationary" or
    "permutation"), ``criterion`` ("embedding" or "centroid"),
    ``absolute_weights``, ``seed``, ``threads``.

    Returns the detection report as a dict with keys ``config``, ``T``, ``p``,
    ``change_points``, ``tests``, and ``failures``.
    """
    return json.loads(_core.detect_json(y, **kwargs))
