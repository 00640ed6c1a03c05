"""Product-space embedding for many-set problems.

A point of the product space X^m is stored as an (m, n) array: row i is the
component associated with set C_i.  The two product sets of interest are
C = C_1 x ... x C_m (project row-wise) and the diagonal D = {(x, ..., x)}
(project by averaging rows).  x lies in the intersection of all C_i exactly
when (x, ..., x) lies in C and D, which is what lets two-set splitting
methods run on any number of sets.
"""

from __future__ import annotations

import numpy as np

from .geometry import InvalidSpecError

__all__ = ["make_product_point", "project_cartesian", "project_diagonal", "diagonal_part"]


def make_product_point(x, m: int) -> np.ndarray:
    """Stack m copies of x into an (m, n) product point."""
    if m < 1:
        raise InvalidSpecError("need m >= 1 copies")
    x = np.asarray(x, dtype=float)
    return np.tile(x, (m, 1))


def project_cartesian(parts: np.ndarray, sets) -> np.ndarray:
    """Project row i of `parts` onto sets[i] (the Cartesian product set)."""
    parts = np.asarray(parts, dtype=float)
    if parts.ndim != 2 or parts.shape[0] != len(sets):
        raise InvalidSpecError(
            f"expected ({len(sets)}, n) product point, got shape {parts.shape}"
        )
    return np.stack([c.project(parts[i]) for i, c in enumerate(sets)])


def project_diagonal(parts: np.ndarray) -> np.ndarray:
    """Project onto the diagonal: every row becomes the row average."""
    parts = np.asarray(parts, dtype=float)
    if parts.ndim != 2:
        raise InvalidSpecError(f"expected a 2-D product point, got shape {parts.shape}")
    mean = parts.mean(axis=0)
    return np.tile(mean, (parts.shape[0], 1))


def diagonal_part(parts: np.ndarray) -> np.ndarray:
    """The row average of a product point (the monitored iterate)."""
    parts = np.asarray(parts, dtype=float)
    return parts.mean(axis=0)
