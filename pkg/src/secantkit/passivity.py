"""Output-strict-passivity gains, positive-realness tests, and certificates.

For a stable strictly proper ``G = p/q`` the central quantity is

    gamma_s = sup_{w} |G(i w)|**2 / Re G(i w),

the smallest gamma such that ``||y||_T**2 <= gamma <u, y>_T`` holds for every
input and horizon. Writing ``x = w**2``, the ratio equals ``N(x)/D(x)`` with
``N = |p(i w)|**2`` and ``D = Re[p(i w) conj(q(i w))]``, so suprema reduce to
finitely many candidates: ``x = 0``, nonnegative roots of ``N'D - ND'``, and
the ``x -> inf`` limit when degrees tie. The H-infinity gain uses the same
machinery on ``|p|**2 / |q|**2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, NotStableError
from .poly import (
    Polynomial,
    RationalTransfer,
    divmod_poly,
    mag_squared_even,
    poly_gcd,
    re_cross_even,
    real_roots_nonneg,
    routh_hurwitz,
)
from .poly import _eval_real_with_scale

__all__ = [
    "GainCertificate",
    "OspStatus",
    "SprStatus",
    "SprVerdict",
    "CircleCheck",
    "MichaelisMenten",
    "LinearGain",
    "StaticNonlinearity",
    "secant_gain",
    "hinf_gain",
    "is_osp",
    "is_spr",
    "circle_certificate",
    "static_gain",
    "iqc_matrix",
]

# Relative tolerance for gain comparisons and certificate cross-checks.
GAIN_REL_TOL = 1e-9

# Absolute tolerance (in x = w**2) for root refinement inside gain computations.
ROOT_X_TOL = 1e-12


@dataclass(frozen=True)
class GainCertificate:
    """Outcome of a supremum-of-ratio gain computation.

    ``gamma`` may be ``math.inf``. When finite and not attained at infinity,
    ``witness_omega`` is a frequency where the underlying ratio equals
    ``gamma`` to relative 1e-9. ``candidates`` lists every (omega, value)
    pair examined, with ``omega = inf`` marking the high-frequency limit.
    ``degenerate`` flags the zero-numerator case. ``reason`` explains an
    infinite gamma.
    """

    gamma: float
    witness_omega: float | None
    attained_at_infinity: bool
    candidates: tuple[tuple[float, float], ...] = ()
    degenerate: bool = False
    reason: str | None = None


class OspStatus(enum.Enum):
    """Output strict passivity classification for a rational block.

    ``RELATIVE_DEGREE_TOO_HIGH`` also covers the rarer degenerate case where
    the relative degree is one but the real part decays too fast anyway
    (the cross polynomial loses degree to cancellation and the gain ratio
    grows without bound at high frequency).
    """

    STABLE_FINITE_GAIN = "stable_finite_gain"
    UNSTABLE = "unstable"
    NONPOSITIVE_REAL_PART = "nonpositive_real_part"
    RELATIVE_DEGREE_TOO_HIGH = "relative_degree_too_high"

    @property
    def holds(self) -> bool:
        return self is OspStatus.STABLE_FINITE_GAIN


class SprStatus(enum.Enum):
    NOT_STABLE = "not_stable"
    REAL_PART_NOT_POSITIVE = "real_part_not_positive"
    HIGH_FREQUENCY_LIMIT_NONPOSITIVE = "high_frequency_limit_nonpositive"


@dataclass(frozen=True)
class SprVerdict:
    """Strict positive realness verdict with the first failed condition."""

    is_spr: bool
    failed: SprStatus | None = None


@dataclass(frozen=True)
class CircleCheck:
    """Disc-containment verification of ``|G(i w) - gamma/2| <= gamma/2``."""

    passes: bool
    max_violation: float
    worst_omega: float


@dataclass(frozen=True)
class MichaelisMenten:
    """Saturating sector nonlinearity ``r -> V r / (K + a + r)``.

    Defined for ``r > -(K + a)``; the sector bound with gain ``V/K`` holds on
    ``r >= -a``. The supremum ``V/K`` of the incremental ratio is approached
    as ``r -> -a`` but not attained by any square-integrable input.
    """

    V: float
    K: float
    a: float = 0.0

    def __post_init__(self):
        if not (self.V > 0 and self.K > 0):
            raise DegenerateInputError("Michaelis-Menten needs V > 0 and K > 0")
        if self.a < 0:
            raise DegenerateInputError("Michaelis-Menten offset a must be >= 0")

    def __call__(self, r: float) -> float:
        return self.V * r / (self.K + self.a + r)


@dataclass(frozen=True)
class LinearGain:
    """Static gain block ``r -> k r`` with ``k > 0``."""

    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise DegenerateInputError("static gain k must be > 0")

    def __call__(self, r: float) -> float:
        return self.k * r


StaticNonlinearity = MichaelisMenten | LinearGain


def _ratio_at(N: Polynomial, D: Polynomial, x: float) -> float:
    # N/D at x; shared near-zeros resolved by l'Hopital up to six levels.
    for _ in range(6):
        nv, nsc = _eval_real_with_scale(N, x)
        dv, dsc = _eval_real_with_scale(D, x)
        n_zero = abs(nv) <= 1e-10 * max(nsc, 1e-300)
        d_zero = abs(dv) <= 1e-10 * max(dsc, 1e-300)
        if not d_zero:
            return nv / dv
        if not n_zero:
            return math.inf
        N, D = N.derivative(), D.derivative()
        if D.is_zero:
            return math.inf
    return math.inf


def _positive_at(p: Polynomial, x: float) -> bool:
    v, sc = _eval_real_with_scale(p, x)
    return v > 1e-12 * max(sc, 1e-300)


def _negative_at(p: Polynomial, x: float) -> bool:
    v, sc = _eval_real_with_scale(p, x)
    return v < -1e-12 * max(sc, 1e-300)


def secant_gain(G: RationalTransfer) -> GainCertificate:
    """Smallest gamma with ``||y||_T**2 <= gamma <u, y>_T`` for all inputs.

    Requires a Hurwitz denominator (raises NotStableError otherwise). Returns
    ``gamma = inf`` with a reason when the real part of ``G(i w)`` is not
    positive wherever ``|G|`` is nonzero, or when the ratio grows without
    bound at high frequency. A zero numerator yields ``gamma = 0`` with the
    ``degenerate`` flag instead of an error.
    """
    p, q = G.num, G.den
    if p.is_zero:
        return GainCertificate(
            gamma=0.0,
            witness_omega=None,
            attained_at_infinity=False,
            degenerate=True,
        )
    if not routh_hurwitz(q).stable:
        raise NotStableError("secant gain requires a Hurwitz denominator")

    N = mag_squared_even(p)
    D = re_cross_even(p, q)
    # Cancel shared factors so removable coincident zeros (e.g. G = s/q with
    # N = D = x at x = 0) do not read as poles of the ratio.
    g = poly_gcd(N, D, tol=1e-9)
    if g.degree >= 1:
        N = divmod_poly(N, g)[0]
        D = divmod_poly(D, g)[0]
    if D.is_zero:
        return GainCertificate(
            gamma=math.inf,
            witness_omega=None,
            attained_at_infinity=False,
            reason="nonpositive_real_part",
        )

    d_roots = real_roots_nonneg(D, tol=ROOT_X_TOL) if D.degree >= 1 else []
    for r in d_roots:
        if _positive_at(N, r):
            return GainCertificate(
                gamma=math.inf,
                witness_omega=math.sqrt(r),
                attained_at_infinity=False,
                reason="nonpositive_real_part",
            )
    sign_points = [0.0]
    for a, b in zip(d_roots, d_roots[1:]):
        sign_points.append(0.5 * (a + b))
    sign_points.append(2.0 * (d_roots[-1] + 1.0) if d_roots else 1.0)
    for x in sign_points:
        if _negative_at(D, x) and _positive_at(N, x):
            return GainCertificate(
                gamma=math.inf,
                witness_omega=math.sqrt(x),
                attained_at_infinity=False,
                reason="nonpositive_real_part",
            )

    if N.degree > D.degree:
        return GainCertificate(
            gamma=math.inf,
            witness_omega=None,
            attained_at_infinity=True,
            reason="unbounded_high_frequency_ratio",
        )

    xs = {0.0}
    crit = N.derivative() * D - N * D.derivative()
    if not crit.is_zero and crit.degree >= 1:
        xs.update(real_roots_nonneg(crit, tol=ROOT_X_TOL))
    candidates = [(math.sqrt(x), _ratio_at(N, D, x)) for x in sorted(xs)]
    limit = None
    if N.degree == D.degree:
        limit = N.leading / D.leading
        candidates.append((math.inf, limit))

    best_finite = max(
        (c for c in candidates if math.isfinite(c[0])), key=lambda c: c[1]
    )
    if limit is not None and limit > best_finite[1] * (1.0 + 1e-12):
        return GainCertificate(
            gamma=limit,
            witness_omega=None,
            attained_at_infinity=True,
            candidates=tuple(candidates),
        )
    return GainCertificate(
        gamma=best_finite[1],
        witness_omega=best_finite[0],
        attained_at_infinity=False,
        candidates=tuple(candidates),
    )


def hinf_gain(G: RationalTransfer) -> GainCertificate:
    """Peak magnitude ``sup_w |G(i w)|`` with its witness frequency.

    Strict properness makes the high-frequency limit zero, so the supremum
    is attained at a finite frequency: ``x = 0`` or a nonnegative root of
    the derivative numerator of ``|p|**2 / |q|**2``.
    """
    p, q = G.num, G.den
    if p.is_zero:
        return GainCertificate(
            gamma=0.0,
            witness_omega=None,
            attained_at_infinity=False,
            degenerate=True,
        )
    if not routh_hurwitz(q).stable:
        raise NotStableError("H-infinity gain requires a Hurwitz denominator")

    Np = mag_squared_even(p)
    Nq = mag_squared_even(q)
    xs = {0.0}
    crit = Np.derivative() * Nq - Np * Nq.derivative()
    if not crit.is_zero and crit.degree >= 1:
        xs.update(real_roots_nonneg(crit, tol=ROOT_X_TOL))
    candidates = [
        (math.sqrt(x), math.sqrt(max(_ratio_at(Np, Nq, x), 0.0))) for x in sorted(xs)
    ]
    best = max(candidates, key=lambda c: c[1])
    return GainCertificate(
        gamma=best[1],
        witness_omega=best[0],
        attained_at_infinity=False,
        candidates=tuple(candidates),
    )


def is_osp(G: RationalTransfer) -> OspStatus:
    """Classify output strict passivity of a rational block."""
    if not routh_hurwitz(G.den).stable:
        return OspStatus.UNSTABLE
    if G.num.is_zero:
        return OspStatus.STABLE_FINITE_GAIN
    if G.relative_degree >= 2:
        return OspStatus.RELATIVE_DEGREE_TOO_HIGH
    cert = secant_gain(G)
    if math.isfinite(cert.gamma):
        return OspStatus.STABLE_FINITE_GAIN
    if cert.reason == "nonpositive_real_part":
        return OspStatus.NONPOSITIVE_REAL_PART
    return OspStatus.RELATIVE_DEGREE_TOO_HIGH


def is_spr(G: RationalTransfer) -> SprVerdict:
    """Strict positive realness test.

    Checks, in order: Hurwitz denominator; ``Re G(i w) > 0`` for all finite
    ``w`` (no nonnegative real roots of the cross polynomial and a positive
    value at zero); and a positive high-frequency limit of
    ``w**2 Re G(i w)``, equivalently the cross polynomial has x-degree
    exactly ``deg |q|**2 - 1`` with a positive leading coefficient.
    """
    if not routh_hurwitz(G.den).stable:
        return SprVerdict(False, SprStatus.NOT_STABLE)
    p, q = G.num, G.den
    if p.is_zero:
        return SprVerdict(False, SprStatus.REAL_PART_NOT_POSITIVE)
    D = re_cross_even(p, q)
    if D.is_zero or not _positive_at(D, 0.0):
        return SprVerdict(False, SprStatus.REAL_PART_NOT_POSITIVE)
    if D.degree >= 1 and real_roots_nonneg(D, tol=ROOT_X_TOL):
        return SprVerdict(False, SprStatus.REAL_PART_NOT_POSITIVE)
    Nq = mag_squared_even(q)
    if D.degree != Nq.degree - 1 or D.leading <= 0:
        return SprVerdict(False, SprStatus.HIGH_FREQUENCY_LIMIT_NONPOSITIVE)
    return SprVerdict(True, None)


def circle_certificate(
    G: RationalTransfer, gamma: float, n_samples: int = 2000
) -> CircleCheck:
    """Verify ``|G(i w) - gamma/2| <= gamma/2`` on a log grid plus critical points.

    The grid spans ``w`` in ``[1e-3, 1e3]`` with ``n_samples`` points,
    augmented by ``w = 0`` and the candidate frequencies of the secant-gain
    computation. Violations within ``1e-9 * max(1, gamma)`` count as passes.
    """
    if not (math.isfinite(gamma) and gamma > 0):
        raise DegenerateInputError("circle certificate needs a finite gamma > 0")
    if n_samples < 2:
        raise DegenerateInputError("n_samples must be >= 2")
    omegas = list(np.logspace(-3.0, 3.0, n_samples))
    omegas.append(0.0)
    try:
        cert = secant_gain(G)
        omegas.extend(w for w, _ in cert.candidates if math.isfinite(w))
        if cert.witness_omega is not None and math.isfinite(cert.witness_omega):
            omegas.append(cert.witness_omega)
    except NotStableError:
        raise
    center = gamma / 2.0
    worst = -math.inf
    worst_w = 0.0
    for w in omegas:
        v = abs(G(1j * w) - center) - center
        if v > worst:
            worst = v
            worst_w = w
    tol = GAIN_REL_TOL * max(1.0, gamma)
    return CircleCheck(passes=worst <= tol, max_violation=worst, worst_omega=worst_w)


def static_gain(nl: StaticNonlinearity) -> float:
    """Secant (sector) gain of a static block: ``V/K`` or ``k``.

    For the saturating nonlinearity this is a supremum over the operating
    range, approached at the left edge of the sector and not attained by
    any square-integrable input.
    """
    if isinstance(nl, MichaelisMenten):
        return nl.V / nl.K
    if isinstance(nl, LinearGain):
        return nl.k
    raise DegenerateInputError(f"not a static nonlinearity: {nl!r}")


def iqc_matrix(gamma: float) -> np.ndarray:
    """Quadratic-form matrix ``[[0, gamma/2], [gamma/2, -1]]``.

    The output-strict-passivity inequality is ``[u; y]^T M [u; y] >= 0``
    integrated over any horizon.
    """
    if not (math.isfinite(gamma) and gamma >= 0):
        raise DegenerateInputError("IQC matrix needs a finite gamma >= 0")
    m = np.array([[0.0, gamma / 2.0], [gamma / 2.0, -1.0]])
    m.flags.writeable = False
    return m
