"""Real polynomials, rational transfer functions, and stability tests.

Polynomials are stored as ascending coefficient tuples: ``coeffs[k]``
multiplies ``s**k``. Everything downstream (gain computation, cascade
certificates, the CLI text format) builds on the operations here:
complex evaluation, the even polynomials ``|p(i w)|**2`` and
``Re[p(i w) conj(q(i w))]`` in the variable ``x = w**2``, a Routh-Hurwitz
test with epsilon substitution, and Sturm-sequence real-root isolation
on the nonnegative axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DegenerateInputError

__all__ = [
    "Polynomial",
    "RationalTransfer",
    "StabilityVerdict",
    "eval_complex",
    "mag_squared_even",
    "re_cross_even",
    "routh_hurwitz",
    "real_roots_nonneg",
    "poly_gcd",
    "square_free",
]

# Trailing coefficients below this fraction of the largest coefficient are
# stripped during canonicalization.
COEFF_EPS = 1e-12

# A Routh entry counts as zero when smaller than this fraction of its row max.
ROUTH_ZERO_REL = 1e-9

_STURM_REM_EPS = 1e-10


class Polynomial:
    """Immutable real polynomial in one variable, ascending coefficients.

    Canonical form keeps the trailing (highest-degree) coefficient
    meaningfully nonzero: trailing entries with ``|c| < 1e-12 * max|c_i|``
    are stripped. The zero polynomial is the single coefficient ``(0.0,)``
    and reports ``degree == -1``.
    """

    __slots__ = ("coeffs",)

    coeffs: tuple[float, ...]

    def __init__(self, coeffs=(0.0,)):
        if isinstance(coeffs, Polynomial):
            object.__setattr__(self, "coeffs", coeffs.coeffs)
            return
        c = [float(v) for v in coeffs]
        if not c:
            c = [0.0]
        if not all(math.isfinite(v) for v in c):
            raise DegenerateInputError("polynomial coefficients must be finite")
        m = max(abs(v) for v in c)
        if m == 0.0:
            c = [0.0]
        else:
            while len(c) > 1 and abs(c[-1]) < COEFF_EPS * m:
                c.pop()
            if len(c) == 1 and abs(c[0]) < COEFF_EPS * m:
                c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @property
    def degree(self) -> int:
        """Degree; -1 marks the zero polynomial."""
        if self.is_zero:
            return -1
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def __call__(self, s):
        return eval_complex(self, s)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({self.coeffs!r})"

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial((float(other),))
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, v in enumerate(b):
            out[k] += v
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-v for v in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial((float(other),))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Polynomial()
        a, b = self.coeffs, other.coeffs
        out = [0.0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0.0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Polynomial(out)

    __rmul__ = __mul__

    def scale(self, k: float) -> "Polynomial":
        return Polynomial(tuple(k * v for v in self.coeffs))

    def derivative(self) -> "Polynomial":
        if len(self.coeffs) == 1:
            return Polynomial()
        return Polynomial(tuple(k * v for k, v in enumerate(self.coeffs) if k > 0))

    def to_text(self) -> str:
        """Comma-separated ascending coefficients, e.g. ``1,1,1`` for 1+s+s^2."""
        return ",".join(repr(v) for v in self.coeffs)

    @classmethod
    def from_text(cls, text: str) -> "Polynomial":
        parts = [t.strip() for t in text.split(",")]
        if not parts or any(p == "" for p in parts):
            raise DegenerateInputError(f"malformed coefficient list: {text!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise DegenerateInputError(f"malformed coefficient list: {text!r}") from exc
        return cls(vals)


def eval_complex(p: Polynomial, s: complex) -> complex:
    """Evaluate ``p`` at a complex point by Horner's scheme."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * s + c
    return acc


def _eval_real_with_scale(p: Polynomial, x: float) -> tuple[float, float]:
    # Returns (p(x), sum |c_i| |x|^i); the scale bounds roundoff in p(x).
    acc = 0.0
    scale = 0.0
    ax = abs(x)
    for c in reversed(p.coeffs):
        acc = acc * x + c
        scale = scale * ax + abs(c)
    return acc, scale


def even_odd_parts(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Split ``p(i w) = A(w**2) + i w B(w**2)``; returns ``(A, B)`` in x = w**2."""
    a = []
    b = []
    for k, c in enumerate(p.coeffs):
        j, rem = divmod(k, 2)
        v = c if j % 2 == 0 else -c
        if rem == 0:
            a.append(v)
        else:
            b.append(v)
    return Polynomial(a or (0.0,)), Polynomial(b or (0.0,))


def mag_squared_even(p: Polynomial) -> Polynomial:
    """``|p(i w)|**2`` as a polynomial in ``x = w**2``."""
    if p.is_zero:
        raise DegenerateInputError("magnitude polynomial needs a nonzero input")
    a, b = even_odd_parts(p)
    return a * a + Polynomial((0.0, 1.0)) * (b * b)


def re_cross_even(p: Polynomial, q: Polynomial) -> Polynomial:
    """``Re[p(i w) * conj(q(i w))]`` as a polynomial in ``x = w**2``."""
    if p.is_zero or q.is_zero:
        raise DegenerateInputError("cross polynomial needs nonzero inputs")
    ap, bp = even_odd_parts(p)
    aq, bq = even_odd_parts(q)
    return ap * aq + Polynomial((0.0, 1.0)) * (bp * bq)


def divmod_poly(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Euclidean division ``a = q*b + r`` with ``deg r < deg b``."""
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    if a.degree < b.degree:
        return Polynomial(), a
    rem = list(a.coeffs)
    bc = b.coeffs
    lb = bc[-1]
    nq = len(rem) - len(bc) + 1
    quot = [0.0] * nq
    for k in range(nq - 1, -1, -1):
        f = rem[k + len(bc) - 1] / lb
        quot[k] = f
        if f != 0.0:
            for j, bj in enumerate(bc):
                rem[k + j] -= f * bj
    return Polynomial(quot), Polynomial(rem[: max(1, len(bc) - 1)])


def _unit_norm(p: Polynomial) -> Polynomial:
    m = max(abs(v) for v in p.coeffs)
    if m == 0.0:
        return p
    return p.scale(1.0 / m)


def _prem_scaled(a: Polynomial, b: Polynomial) -> tuple[Polynomial, float]:
    # Pseudo-remainder with the positive multiplier |lc(b)|**delta, which keeps
    # intermediate magnitudes bounded without flipping signs (needed for Sturm).
    # Returns the multiplier too: zero tests on the remainder must be relative
    # to it, or a small leading coefficient masks a genuine remainder.
    delta = a.degree - b.degree + 1
    mult = 1.0
    if delta > 0:
        mult = abs(b.leading) ** delta
        a = a.scale(mult)
    _, r = divmod_poly(a, b)
    return r, mult


def poly_gcd(a: Polynomial, b: Polynomial, tol: float = _STURM_REM_EPS) -> Polynomial:
    """Approximate monic GCD via a normalized Euclidean remainder sequence.

    Remainders with max-norm below ``tol`` (inputs are renormalized to unit
    max-norm each step) are treated as zero. Float-coefficient GCDs are
    inherently approximate; ``tol`` is the working coprimality threshold.
    """
    if a.is_zero:
        g = b
    elif b.is_zero:
        g = a
    else:
        f, g = _unit_norm(a), _unit_norm(b)
        if f.degree < g.degree:
            f, g = g, f
        while not g.is_zero and g.degree > 0:
            r, mult = _prem_scaled(f, g)
            if max(abs(v) for v in r.coeffs) < tol * mult:
                r = Polynomial()
            f, g = g, _unit_norm(r)
        if g.is_zero:
            g = f
    if g.is_zero or g.degree == 0:
        return Polynomial((1.0,))
    return g.scale(1.0 / g.leading)


def square_free(p: Polynomial) -> Polynomial:
    """Square-free part ``p / gcd(p, p')`` (approximate, monic up to scale)."""
    if p.degree < 1:
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p
    q, _ = divmod_poly(p, g)
    if q.is_zero:
        return p
    return q


# ---------------------------------------------------------------------------
# Routh-Hurwitz with epsilon substitution
# ---------------------------------------------------------------------------


class _Eps:
    """Truncated Laurent series in a positive infinitesimal epsilon.

    Supports the Routh recurrence symbolically so that sign decisions after
    an epsilon substitution are taken in the limit eps -> 0+. Terms are a
    dict {power: coeff}; the dominant term is the smallest power present.
    """

    __slots__ = ("terms",)
    _ORDER = 24

    def __init__(self, terms=None):
        self.terms = dict(terms) if terms else {}
        self._clean()

    @classmethod
    def const(cls, v: float) -> "_Eps":
        return cls({0: v} if v != 0.0 else {})

    def _clean(self):
        t = self.terms
        if not t:
            return
        m = max(abs(c) for c in t.values())
        if m == 0.0:
            t.clear()
            return
        kmin = min(k for k, c in t.items() if abs(c) >= 1e-14 * m)
        drop = [k for k, c in t.items() if abs(c) < 1e-14 * m or k > kmin + self._ORDER]
        for k in drop:
            del t[k]

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def dominant(self) -> tuple[int, float]:
        k = min(self.terms)
        return k, self.terms[k]

    def sign(self) -> int:
        if self.is_zero:
            return 0
        _, c = self.dominant()
        return 1 if c > 0 else -1

    def limit(self) -> float:
        # Value as eps -> 0+; negative powers give signed infinity.
        if self.is_zero:
            return 0.0
        k, c = self.dominant()
        if k < 0:
            return math.copysign(math.inf, c)
        if k > 0:
            return 0.0
        return c

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0.0) + c
        return _Eps(t)

    def __sub__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0.0) - c
        return _Eps(t)

    def __mul__(self, other):
        out: dict[int, float] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 + k2
                out[k] = out.get(k, 0.0) + c1 * c2
        return _Eps(out)

    def scale(self, v: float) -> "_Eps":
        return _Eps({k: c * v for k, c in self.terms.items()})

    def __truediv__(self, other):
        if other.is_zero:
            raise ZeroDivisionError("division by zero epsilon series")
        k0, c0 = other.dominant()
        # other = c0 eps^k0 (1 + u), invert the (1 + u) factor by geometric series
        u = _Eps({k - k0: c / c0 for k, c in other.terms.items() if k != k0})
        inv = _Eps.const(1.0)
        term = _Eps.const(1.0)
        for _ in range(self._ORDER):
            term = term * u
            if term.is_zero:
                break
            inv = inv - term if _ % 2 == 0 else inv + term
        num = self * inv
        return _Eps({k - k0: c / c0 for k, c in num.terms.items()})


@dataclass(frozen=True)
class StabilityVerdict:
    """Routh-Hurwitz outcome.

    ``stable`` means every root lies strictly in the open left half plane.
    ``marginal`` means a first-column zero event occurred (imaginary-axis
    roots, possibly repeated) and no sign change appeared; a verdict is
    never both. ``routh_table`` holds the limiting first-to-last rows for
    diagnostics (signed infinities mark entries that blow up as the
    epsilon substitute vanishes).
    """

    stable: bool
    marginal: bool
    routh_table: tuple[tuple[float, ...], ...]


def routh_hurwitz(p: Polynomial) -> StabilityVerdict:
    """Routh-Hurwitz stability test with epsilon substitution.

    A first-column zero in a nonzero row is replaced by a positive
    infinitesimal; an all-zero row is replaced by the derivative of the
    auxiliary polynomial of the row above. Entries count as zero when
    below ``1e-9`` of their row's max-norm.
    """
    if p.degree < 1:
        raise DegenerateInputError("stability test needs degree >= 1")
    coeffs = list(p.coeffs)
    if coeffs[-1] < 0:
        coeffs = [-v for v in coeffs]
    desc = coeffs[::-1]
    n = len(desc) - 1
    width = n // 2 + 1

    def pad(row):
        return row + [_Eps.const(0.0)] * (width - len(row))

    rows: list[list[_Eps]] = [pad([_Eps.const(v) for v in desc[0::2]])]
    had_zero = False

    def snap(row: list[_Eps]) -> list[_Eps]:
        m = max(e.max_abs() for e in row)
        if m == 0.0:
            return row
        return [
            _Eps.const(0.0) if e.max_abs() < ROUTH_ZERO_REL * m else e for e in row
        ]

    def aux_derivative(prev: list[_Eps], power: int) -> list[_Eps]:
        out = []
        m = power
        for e in prev:
            if m <= 0:
                break
            out.append(e.scale(float(m)))
            m -= 2
        return pad(out)

    for i in range(1, n + 1):
        if i == 1:
            row = pad([_Eps.const(v) for v in desc[1::2]])
        else:
            prev, prev2 = rows[i - 1], rows[i - 2]
            p0, q0 = prev[0], prev2[0]
            row = []
            for j in range(width - 1):
                row.append((p0 * prev2[j + 1] - q0 * prev[j + 1]) / p0)
            row = pad(row)
        row = snap(row)
        if all(e.is_zero for e in row):
            had_zero = True
            row = aux_derivative(rows[i - 1], n - i + 1)
        elif row[0].is_zero:
            had_zero = True
            row[0] = _Eps({1: 1.0})
        rows.append(row)

    signs = [r[0].sign() for r in rows]
    changes = 0
    last = 0
    for s in signs:
        if s == 0:
            continue
        if last != 0 and s != last:
            changes += 1
        last = s
    stable = changes == 0 and not had_zero
    marginal = changes == 0 and had_zero
    table = tuple(tuple(e.limit() for e in r) for r in rows)
    return StabilityVerdict(stable=stable, marginal=marginal, routh_table=table)


# ---------------------------------------------------------------------------
# Sturm sequences and real root isolation on [0, inf)
# ---------------------------------------------------------------------------


def _sturm_chain(g: Polynomial) -> list[Polynomial]:
    chain = [_unit_norm(g), _unit_norm(g.derivative())]
    while not chain[-1].is_zero and chain[-1].degree > 0:
        r, mult = _prem_scaled(chain[-2], chain[-1])
        if r.is_zero or max(abs(v) for v in r.coeffs) < _STURM_REM_EPS * mult:
            break
        chain.append(_unit_norm(-r))
    return [c for c in chain if not c.is_zero]


def _variations(chain: list[Polynomial], x: float) -> int:
    count = 0
    last = 0
    for p in chain:
        v, scale = _eval_real_with_scale(p, x)
        if abs(v) <= 1e-13 * max(scale, 1e-300):
            continue
        s = 1 if v > 0 else -1
        if last != 0 and s != last:
            count += 1
        last = s
    return count


def _cauchy_bound(g: Polynomial) -> float:
    lc = abs(g.leading)
    return 1.0 + max(abs(v) for v in g.coeffs[:-1]) / lc if g.degree >= 1 else 1.0


def _refine_root(g: Polynomial, chain: list[Polynomial], lo: float, up: float,
                 tol: float) -> float:
    # Sign bisection on g localizes to the evaluation noise floor; the fuzzy
    # zero threshold inside _variations would stop ~1e3 ulp short of that.
    vlo, _ = _eval_real_with_scale(g, lo)
    vup, _ = _eval_real_with_scale(g, up)
    if vup == 0.0:
        # intervals are (lo, up]; an exact zero at lo belongs to the neighbor
        return up
    if vlo != 0.0 and (vlo > 0.0) != (vup > 0.0):
        a, b = lo, up
        pos_a = vlo > 0.0
        while b - a >= tol:
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            vm, _ = _eval_real_with_scale(g, mid)
            if vm == 0.0:
                return mid
            if (vm > 0.0) == pos_a:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)
    # Equal endpoint signs: an endpoint sits in its own noise zone (or the
    # interval was forced closed at width < tol); fall back to variations.
    a, b = lo, up
    va = _variations(chain, a)
    while b - a >= tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if va - _variations(chain, mid) >= 1:
            b = mid
        else:
            a = mid
            va = _variations(chain, a)
    return 0.5 * (a + b)


def real_roots_nonneg(p: Polynomial, tol: float = 1e-12) -> list[float]:
    """Distinct real roots of ``p`` in ``[0, inf)``, sorted ascending.

    Sturm-sequence isolation on the square-free part followed by bisection
    until each isolating interval is narrower than ``tol``. Multiple roots
    are collapsed by the square-free reduction and reported once.
    """
    if p.is_zero:
        raise DegenerateInputError("root isolation needs a nonzero polynomial")
    if p.degree < 1:
        return []

    roots: list[float] = []
    work = p
    m = max(abs(v) for v in work.coeffs)
    while work.degree >= 1 and abs(work.coeffs[0]) <= 1e-14 * m:
        roots.append(0.0)
        work = Polynomial(work.coeffs[1:])
    if work.degree < 1:
        return sorted(set(roots))

    g = square_free(work)
    if g.degree < 1:
        return sorted(set(roots))
    chain = _sturm_chain(g)
    hi = _cauchy_bound(g)
    total = _variations(chain, 0.0) - _variations(chain, hi)
    if total > 0:
        stack = [(0.0, hi, total)]
        guard = 0
        while stack:
            guard += 1
            if guard > 100000:
                raise ConvergenceError("root isolation failed to terminate")
            lo, up, count = stack.pop()
            if count <= 0:
                continue
            if count == 1 or up - lo < tol:
                roots.append(_refine_root(g, chain, lo, up, tol))
            else:
                mid = 0.5 * (lo + up)
                cl = _variations(chain, lo) - _variations(chain, mid)
                stack.append((lo, mid, cl))
                stack.append((mid, up, count - cl))

    roots.sort()
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > max(tol, 1e-12):
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# Rational transfer functions
# ---------------------------------------------------------------------------


class RationalTransfer:
    """Strictly proper SISO transfer function ``G = num/den``.

    The denominator is normalized monic (leading coefficient +1, numerator
    rescaled to compensate). Construction rejects improper fractions and
    numerator/denominator pairs sharing a root within the coprimality
    tolerance ``1e-8``. A zero numerator is allowed (degenerate but valid).
    """

    __slots__ = ("num", "den")

    COPRIME_TOL = 1e-8

    def __init__(self, num, den):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero:
            raise DegenerateInputError("denominator must be nonzero")
        if den.degree < 1:
            raise DegenerateInputError("denominator must have degree >= 1")
        if not num.is_zero and num.degree >= den.degree:
            raise DegenerateInputError(
                "transfer function must be strictly proper (deg num < deg den)"
            )
        lc = den.leading
        den = den.scale(1.0 / lc)
        num = num.scale(1.0 / lc)
        if not num.is_zero:
            g = poly_gcd(num, den, tol=self.COPRIME_TOL)
            if g.degree >= 1:
                raise DegenerateInputError(
                    "numerator and denominator share a root (not coprime within 1e-8)"
                )
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalTransfer is immutable")

    def __call__(self, s: complex) -> complex:
        return eval_complex(self.num, s) / eval_complex(self.den, s)

    def __eq__(self, other):
        if not isinstance(other, RationalTransfer):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalTransfer({self.num.coeffs!r}, {self.den.coeffs!r})"

    @property
    def relative_degree(self) -> int:
        if self.num.is_zero:
            return self.den.degree
        return self.den.degree - self.num.degree

    @classmethod
    def from_text(cls, num_text: str, den_text: str) -> "RationalTransfer":
        return cls(Polynomial.from_text(num_text), Polynomial.from_text(den_text))
