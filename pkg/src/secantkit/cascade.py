"""Secant-condition certificates and closed-loop pole tests for cascades.

A cascade of output-strictly-passive blocks with gains ``gamma_1 .. gamma_n``
in unity negative feedback is L2-stable whenever

    gamma_1 * ... * gamma_n < sec(pi/n)**n,

with the threshold infinite for one or two blocks. For all-linear cascades
the verdict can be cross-checked exactly: the closed-loop poles are the
roots of ``prod(den_i) + prod(num_i)``. The cyclic state matrix with
diagonal ``-alpha_i`` and subdiagonal feed ``beta_i`` (feedback enters the
top-right corner) has characteristic polynomial
``prod(s + alpha_i) + prod(beta_i)`` and makes the threshold sharp when all
``alpha_i`` agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInputError, InfiniteGainError, NotStableError
from .passivity import (
    LinearGain,
    MichaelisMenten,
    StaticNonlinearity,
    secant_gain,
    static_gain,
)
from .poly import Polynomial, RationalTransfer, StabilityVerdict, routh_hurwitz

__all__ = [
    "CascadeSpec",
    "SecantVerdict",
    "secant_threshold",
    "check_secant_condition",
    "cyclic_char_poly",
    "cyclic_matrix_hurwitz",
    "closed_loop_char_poly",
    "closed_loop_stable",
    "cascade_from_json",
    "cascade_to_json",
]

# Products this close (relative) to the threshold get the boundary flag.
BOUNDARY_REL_TOL = 1e-9

Block = RationalTransfer | MichaelisMenten | LinearGain


class CascadeSpec:
    """Ordered cascade of rational and static blocks under unity negative feedback.

    Construction validates that there is at least one block and that every
    rational block has a Hurwitz denominator. Finite secant gains are
    established later by :func:`check_secant_condition` (which recomputes
    them; user-supplied gains are accepted only through an explicit
    override).
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        blocks = tuple(blocks)
        if not blocks:
            raise DegenerateInputError("cascade needs at least one block")
        for i, b in enumerate(blocks):
            if isinstance(b, RationalTransfer):
                if not routh_hurwitz(b.den).stable:
                    raise NotStableError(f"cascade block {i + 1} is not stable")
            elif not isinstance(b, (MichaelisMenten, LinearGain)):
                raise DegenerateInputError(f"unsupported block type: {type(b).__name__}")
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("CascadeSpec is immutable")

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


@dataclass(frozen=True)
class SecantVerdict:
    """Secant-condition check result.

    ``passes`` is the strict comparison ``product_gain < threshold``;
    ``boundary`` flags products within relative 1e-9 of a finite threshold,
    where the certificate is inconclusive. ``margin`` is
    ``threshold - product_gain``.
    """

    product_gain: float
    threshold: float
    passes: bool
    margin: float
    boundary: bool
    gains: tuple[float, ...]


def secant_threshold(n: int) -> float:
    """``sec(pi/n)**n`` for ``n >= 3``; infinite for one or two blocks.

    Evaluated as ``exp(-n log1p(-2 sin(pi/(2n))**2))`` so that the value
    stays strictly decreasing in ``n`` and accurate near 1 for large ``n``.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise DegenerateInputError("block count must be an integer")
    if n < 1:
        raise DegenerateInputError("block count must be >= 1")
    if n <= 2:
        return math.inf
    s = math.sin(math.pi / (2.0 * n))
    return math.exp(-n * math.log1p(-2.0 * s * s))


def check_secant_condition(
    spec: CascadeSpec, gains_override: tuple[float, ...] | None = None
) -> SecantVerdict:
    """Compare the product of block gains against the secant threshold.

    Gains are always recomputed (secant gain for rational blocks, sector
    gain for static ones) unless ``gains_override`` supplies them
    explicitly. Infinite block gains abort with InfiniteGainError; unstable
    rational blocks raise NotStableError from the gain computation.
    """
    if gains_override is not None:
        gains = tuple(float(g) for g in gains_override)
        if len(gains) != len(spec.blocks):
            raise DegenerateInputError("gain override length must match block count")
        if any(g < 0 or not math.isfinite(g) for g in gains):
            raise DegenerateInputError("gain overrides must be finite and >= 0")
    else:
        out = []
        for i, b in enumerate(spec.blocks):
            if isinstance(b, RationalTransfer):
                cert = secant_gain(b)
                if not math.isfinite(cert.gamma):
                    raise InfiniteGainError(
                        f"cascade block {i + 1} has no finite secant gain"
                        f" ({cert.reason})"
                    )
                out.append(cert.gamma)
            else:
                out.append(static_gain(b))
        gains = tuple(out)

    product = math.prod(gains)
    threshold = secant_threshold(len(spec.blocks))
    boundary = (
        math.isfinite(threshold)
        and abs(product - threshold) < BOUNDARY_REL_TOL * threshold
    )
    return SecantVerdict(
        product_gain=product,
        threshold=threshold,
        passes=product < threshold,
        margin=threshold - product,
        boundary=boundary,
        gains=gains,
    )


def cyclic_char_poly(alphas, betas) -> Polynomial:
    """``prod(s + alpha_i) + prod(beta_i)`` for the cyclic feedback matrix."""
    alphas = [float(a) for a in alphas]
    betas = [float(b) for b in betas]
    if len(alphas) != len(betas):
        raise DegenerateInputError("alphas and betas must have the same length")
    if not alphas:
        raise DegenerateInputError("need at least one diagonal entry")
    if any(a <= 0 for a in alphas) or any(b <= 0 for b in betas):
        raise DegenerateInputError("cyclic matrix entries must be positive")
    poly = Polynomial((1.0,))
    for a in alphas:
        poly = poly * Polynomial((a, 1.0))
    return poly + math.prod(betas)


def cyclic_matrix_hurwitz(alphas, betas) -> StabilityVerdict:
    """Routh-Hurwitz verdict for the cyclic feedback matrix."""
    return routh_hurwitz(cyclic_char_poly(alphas, betas))


def closed_loop_char_poly(blocks) -> Polynomial:
    """Characteristic polynomial ``prod(den_i) + prod(num_i)`` of the loop.

    Defined for all-rational cascades only; static blocks have no poles to
    contribute and are rejected here (use the simulator for mixed loops).
    """
    blocks = tuple(blocks)
    if not blocks:
        raise DegenerateInputError("closed loop needs at least one block")
    for b in blocks:
        if not isinstance(b, RationalTransfer):
            raise DegenerateInputError(
                "closed-loop pole test is defined for rational blocks only"
            )
    num = Polynomial((1.0,))
    den = Polynomial((1.0,))
    for b in blocks:
        num = num * b.num
        den = den * b.den
    return den + num


def closed_loop_stable(blocks) -> bool:
    """True when the closed-loop characteristic polynomial is Hurwitz."""
    return routh_hurwitz(closed_loop_char_poly(blocks)).stable


def cascade_to_json(spec: CascadeSpec) -> dict:
    """Serialize to the interchange schema (see :func:`cascade_from_json`)."""
    out = []
    for b in spec.blocks:
        if isinstance(b, RationalTransfer):
            out.append(
                {
                    "type": "rational",
                    "num": list(b.num.coeffs),
                    "den": list(b.den.coeffs),
                }
            )
        elif isinstance(b, MichaelisMenten):
            out.append({"type": "mm", "V": b.V, "K": b.K, "a": b.a})
        else:
            out.append({"type": "gain", "k": b.k})
    return {"blocks": out}


def cascade_from_json(data: dict) -> CascadeSpec:
    """Parse ``{"blocks": [...]}`` with rational / mm / gain entries.

    Rational blocks carry ascending-coefficient ``num`` and ``den`` arrays;
    ``mm`` blocks carry ``V``, ``K`` and optional ``a``; ``gain`` blocks
    carry ``k``.
    """
    if not isinstance(data, dict) or "blocks" not in data:
        raise DegenerateInputError('cascade JSON must be an object with "blocks"')
    entries = data["blocks"]
    if not isinstance(entries, list):
        raise DegenerateInputError('"blocks" must be a list')
    blocks: list[Block] = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "type" not in e:
            raise DegenerateInputError(f'block {i + 1}: missing "type"')
        kind = e["type"]
        try:
            if kind == "rational":
                blocks.append(RationalTransfer(Polynomial(e["num"]), Polynomial(e["den"])))
            elif kind == "mm":
                blocks.append(
                    MichaelisMenten(float(e["V"]), float(e["K"]), float(e.get("a", 0.0)))
                )
            elif kind == "gain":
                blocks.append(LinearGain(float(e["k"])))
            else:
                raise DegenerateInputError(f"block {i + 1}: unknown type {kind!r}")
        except KeyError as exc:
            raise DegenerateInputError(f"block {i + 1}: missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DegenerateInputError):
                raise
            raise DegenerateInputError(f"block {i + 1}: {exc}") from exc
    return CascadeSpec(blocks)
