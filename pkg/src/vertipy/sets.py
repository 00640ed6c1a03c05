"""Generic convex sets with closed-form projectors.

These cover the small analytic instances used by the verification fixtures
and tests (halfspaces, slabs, balls, linear/affine subspaces).  They expose
the same project/intrepid/residual interface as the profile constraints, so
every algorithm runs unchanged on either kind of set.
"""

from __future__ import annotations

import numpy as np

from .geometry import Constraint, InvalidSpecError, _interval_sstar_intrepid

__all__ = ["HalfspaceSet", "SlabSet", "BallSet", "SpanSet"]


class HalfspaceSet(Constraint):
    """{x : <a, x> <= b}."""

    tag = "Halfspace"

    def __init__(self, a, b: float, mode: str = "exact"):
        a = np.asarray(a, dtype=float)
        if np.linalg.norm(a) == 0:
            raise InvalidSpecError("halfspace normal must be nonzero")
        super().__init__(a.size, mode)
        self.a = a
        self.b = float(b)
        self._nn = float(np.dot(a, a))

    def project(self, x):
        x = self._check(x)
        g = np.dot(self.a, x) - self.b
        if g <= 0:
            return x.copy()
        return x - (g / self._nn) * self.a

    def residual(self, x):
        x = self._check(x)
        return max(np.dot(self.a, x) - self.b, 0.0) / np.sqrt(self._nn)


class SlabSet(Constraint):
    """{x : lo <= <a, x> <= hi}, with the reflect-or-midline intrepid rule."""

    tag = "Slab"

    def __init__(self, a, lo: float, hi: float, mode: str = "exact"):
        a = np.asarray(a, dtype=float)
        if np.linalg.norm(a) == 0:
            raise InvalidSpecError("slab normal must be nonzero")
        if not lo <= hi:
            raise InvalidSpecError("need lo <= hi")
        super().__init__(a.size, mode)
        self.a = a
        self.lo = float(lo)
        self.hi = float(hi)
        self._nn = float(np.dot(a, a))

    def _move(self, x, sstar_fn):
        x = self._check(x)
        s = np.dot(self.a, x)
        sstar = float(sstar_fn(s, self.lo, self.hi))
        if sstar == s:
            return x.copy()
        return x + ((sstar - s) / self._nn) * self.a

    def project(self, x):
        return self._move(x, np.clip)

    def intrepid(self, x):
        return self._move(x, _interval_sstar_intrepid)

    def residual(self, x):
        x = self._check(x)
        s = np.dot(self.a, x)
        return abs(s - min(max(s, self.lo), self.hi)) / np.sqrt(self._nn)


class BallSet(Constraint):
    """Closed Euclidean ball {x : ||x - center|| <= radius}."""

    tag = "Ball"

    def __init__(self, center, radius: float, mode: str = "exact"):
        center = np.asarray(center, dtype=float)
        if radius <= 0:
            raise InvalidSpecError("radius must be positive")
        super().__init__(center.size, mode)
        self.center = center
        self.radius = float(radius)

    def project(self, x):
        x = self._check(x)
        diff = x - self.center
        dist = np.linalg.norm(diff)
        if dist <= self.radius:
            return x.copy()
        return self.center + (self.radius / dist) * diff

    def residual(self, x):
        x = self._check(x)
        return max(np.linalg.norm(x - self.center) - self.radius, 0.0)


class SpanSet(Constraint):
    """Affine subspace offset + span{vectors}; orthonormalized on build."""

    tag = "Span"
    is_affine = True

    def __init__(self, vectors, offset=None, mode: str = "exact"):
        v = np.atleast_2d(np.asarray(vectors, dtype=float))  # rows span the set
        q, r = np.linalg.qr(v.T)
        keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
        if not keep.any():
            raise InvalidSpecError("spanning vectors are all (numerically) zero")
        super().__init__(v.shape[1], mode)
        self.basis = q[:, keep]  # columns orthonormal
        self.offset = (
            np.zeros(self.n) if offset is None else np.asarray(offset, dtype=float)
        )

    def project(self, x):
        x = self._check(x)
        rel = x - self.offset
        return self.offset + self.basis @ (self.basis.T @ rel)
