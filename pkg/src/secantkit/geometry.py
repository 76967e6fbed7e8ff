"""Angle geometry of closed vector chains in inner-product spaces.

A chain ``v_0, v_1, ..., v_n`` with nonnegative consecutive inner products
and ``v_0 = -v_n`` is the finite-dimensional skeleton of a feedback loop:
the angles between consecutive links must add up to at least pi (the
triangle inequality for spherical distance), and Jensen's inequality on the
convex function ``-ln cos`` then bounds the product of cosines by
``cos(pi/n)**n``. These facts are exercised here directly on sampled
vectors, independently of any dynamics.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, DegenerateInputError

__all__ = [
    "angle",
    "VectorChain",
    "chain_cosine_product",
    "angle_sum_lower_bound",
    "jensen_cos_bound",
    "random_chain",
]

ANGLE_SUM_SLACK = 1e-12
JENSEN_SLACK = 1e-12
INNER_NONNEG_RTOL = 1e-12


def _cosine(v, w) -> float:
    # clamped cosine; 1.0 (angle 0) when either vector vanishes
    nv = math.sqrt(float(v @ v))
    nw = math.sqrt(float(w @ w))
    if nv == 0.0 or nw == 0.0:
        return 1.0
    c = float(v @ w) / (nv * nw)
    return max(-1.0, min(1.0, c))


def angle(v, w) -> float:
    """Angle in ``[0, pi]`` between two vectors; 0 if either is zero.

    The cosine is clamped to ``[-1, 1]`` before ``arccos`` so collinear
    vectors survive roundoff.
    """
    return math.acos(_cosine(np.asarray(v, dtype=float), np.asarray(w, dtype=float)))


class VectorChain:
    """Closed chain ``v_0 .. v_n`` with ``v_0 = -v_n`` exactly.

    Invariants checked at construction: at least two links, equal dimension
    >= 2, no zero vectors, consecutive inner products >= 0, and the closing
    identity ``v_0 == -v_n`` holds bitwise (build chains with
    :meth:`close` so the final vector is constructed, not approximated).
    """

    __slots__ = ("vectors",)

    def __init__(self, vectors):
        vs = tuple(np.array(v, dtype=float, copy=True) for v in vectors)
        if len(vs) < 3:
            raise DegenerateInputError("chain needs at least two links (three vectors)")
        dim = vs[0].shape
        if len(dim) != 1 or dim[0] < 2:
            raise DegenerateInputError("chain vectors must be 1-D with dimension >= 2")
        for v in vs:
            if v.shape != dim:
                raise DegenerateInputError("chain vectors must share a dimension")
            if not np.all(np.isfinite(v)):
                raise DegenerateInputError("chain vectors must be finite")
            if not np.any(v):
                raise DegenerateInputError("chain vectors must be nonzero")
        if not np.array_equal(vs[0], -vs[-1]):
            raise DegenerateInputError("chain must close exactly: v_0 == -v_n")
        for i in range(1, len(vs)):
            a, b = vs[i - 1], vs[i]
            # roundoff-relative slack: exactly orthogonal links (the only
            # legal two-link chains) land at +-eps after float projection
            tol = INNER_NONNEG_RTOL * math.sqrt(float(a @ a) * float(b @ b))
            if float(a @ b) < -tol:
                raise DegenerateInputError(
                    f"consecutive inner product {i} is negative"
                )
        for v in vs:
            v.flags.writeable = False
        object.__setattr__(self, "vectors", vs)

    def __setattr__(self, name, value):
        raise AttributeError("VectorChain is immutable")

    @classmethod
    def close(cls, vectors) -> "VectorChain":
        """Append ``-v_0`` to the given ``v_0 .. v_{n-1}`` and validate."""
        vs = [np.array(v, dtype=float) for v in vectors]
        if not vs:
            raise DegenerateInputError("need at least one vector to close a chain")
        vs.append(-vs[0])
        return cls(vs)

    @property
    def n_links(self) -> int:
        return len(self.vectors) - 1

    def angles(self) -> list[float]:
        vs = self.vectors
        return [angle(vs[i - 1], vs[i]) for i in range(1, len(vs))]


def chain_cosine_product(chain: VectorChain) -> float:
    """``prod_i cos(angle(v_{i-1}, v_i))``; at most ``cos(pi/n)**n``.

    Computed from the clamped cosines directly (no arccos round trip), so
    exactly orthogonal links contribute exactly zero.
    """
    vs = chain.vectors
    return math.prod(_cosine(vs[i - 1], vs[i]) for i in range(1, len(vs)))


def angle_sum_lower_bound(chain: VectorChain) -> float:
    """Sum of the consecutive angles, guaranteed >= pi (within 1e-12).

    The guarantee follows from the spherical triangle inequality applied
    along the chain from ``v_0`` to ``-v_0``. A violation beyond the slack
    indicates a broken chain invariant and raises.
    """
    s = sum(chain.angles())
    if s < math.pi - ANGLE_SUM_SLACK:
        raise ConvergenceError(f"angle sum {s} below pi on a valid chain")
    return s


def jensen_cos_bound(thetas) -> tuple[float, float]:
    """``(prod cos(theta_i), cos(mean theta)**n)`` for angles in ``[0, pi/2)``.

    Convexity of ``-ln cos`` on ``[0, pi/2)`` makes the first component at
    most the second (within 1e-12 of roundoff slack).
    """
    ts = [float(t) for t in thetas]
    if not ts:
        raise DegenerateInputError("need at least one angle")
    if any(t < 0.0 or t >= math.pi / 2.0 for t in ts):
        raise DegenerateInputError("angles must lie in [0, pi/2)")
    lhs = math.prod(math.cos(t) for t in ts)
    rhs = math.cos(sum(ts) / len(ts)) ** len(ts)
    return lhs, rhs


def random_chain(n_links: int, dim: int, rng: np.random.Generator) -> VectorChain:
    """Rejection-sample a valid chain with ``n_links`` links in ``R**dim``.

    ``v_0`` is drawn isotropically; each subsequent vector is redrawn until
    its inner product with the predecessor is nonnegative; the closing
    vector is ``-v_0`` by construction and the whole chain is rejected when
    the final inner-product constraint fails.
    """
    if n_links < 2:
        raise DegenerateInputError("a closed chain needs at least two links")
    if dim < 2:
        raise DegenerateInputError("dimension must be >= 2")
    if n_links == 2:
        # the closing constraint forces <v0, v1> = 0 exactly, which
        # rejection hits with probability zero; orthogonalize instead
        for _ in range(10000):
            v0 = rng.standard_normal(dim)
            n0 = float(v0 @ v0)
            if n0 < 1e-12:
                continue
            g = rng.standard_normal(dim)
            v1 = g - (float(g @ v0) / n0) * v0
            v1 = v1 - (float(v1 @ v0) / n0) * v0
            if float(v1 @ v1) < 1e-12 * n0:
                continue
            return VectorChain.close([v0, v1])
        raise ConvergenceError("chain rejection sampling failed to converge")
    for _ in range(10000):
        v0 = rng.standard_normal(dim)
        if not np.any(v0):
            continue
        vs = [v0]
        ok = True
        for _ in range(n_links - 1):
            prev = vs[-1]
            for _ in range(1000):
                cand = rng.standard_normal(dim)
                if np.any(cand) and float(prev @ cand) >= 0.0:
                    vs.append(cand)
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        if float(vs[-1] @ (-v0)) >= 0.0:
            return VectorChain.close(vs)
    raise ConvergenceError("chain rejection sampling failed to converge")
