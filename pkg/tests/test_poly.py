"""Tests for polynomial arithmetic, Routh-Hurwitz, and root isolation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from secantkit.errors import DegenerateInputError
from secantkit.poly import (
    Polynomial,
    RationalTransfer,
    eval_complex,
    mag_squared_even,
    poly_gcd,
    re_cross_even,
    real_roots_nonneg,
    routh_hurwitz,
    square_free,
)

from oracles import durand_kerner_roots, max_real_part


# ---------------------------------------------------------------------------
# Polynomial basics
# ---------------------------------------------------------------------------


def test_canonical_form_strips_trailing_zeros():
    p = Polynomial([1.0, 2.0, 0.0, 0.0])
    assert p.coeffs == (1.0, 2.0)
    assert p.degree == 1


def test_zero_polynomial_degree_marker():
    assert Polynomial([0.0, 0.0]).degree == -1
    assert Polynomial().is_zero
    assert Polynomial([0.0]).coeffs == (0.0,)


def test_nonfinite_coefficients_rejected():
    with pytest.raises(DegenerateInputError):
        Polynomial([1.0, math.inf])
    with pytest.raises(DegenerateInputError):
        Polynomial([math.nan])


def test_add_mul_examples():
    # (s+1)(s+2) = s^2+3s+2
    p = Polynomial([1.0, 1.0]) * Polynomial([2.0, 1.0])
    assert p.coeffs == (2.0, 3.0, 1.0)
    # d/ds s^3 = 3 s^2
    assert Polynomial([0.0, 0.0, 0.0, 1.0]).derivative().coeffs == (0.0, 0.0, 3.0)
    # (s+1) + (-s-1) cancels to the canonical zero
    q = Polynomial([1.0, 1.0]) + Polynomial([-1.0, -1.0])
    assert q.is_zero


def test_scalar_mixing():
    p = Polynomial([1.0, 1.0])
    assert (2 * p).coeffs == (2.0, 2.0)
    assert (p + 1).coeffs == (2.0, 1.0)
    assert (1 - p).coeffs == (0.0, -1.0)
    assert p.scale(0.5).coeffs == (0.5, 0.5)


def test_text_round_trip():
    p = Polynomial([1.0, 0.5, 3.25])
    assert Polynomial.from_text(p.to_text()) == p
    assert Polynomial.from_text("1, 1, 1").coeffs == (1.0, 1.0, 1.0)


def test_from_text_malformed():
    for bad in ("", "1,,2", "1,abc", "1 2"):
        with pytest.raises(DegenerateInputError):
            Polynomial.from_text(bad)


small_ints = st.integers(min_value=-9, max_value=9)
int_polys = st.lists(small_ints, min_size=1, max_size=6).map(Polynomial)


@given(int_polys, int_polys, int_polys)
@settings(max_examples=200)
def test_ring_axioms_exact_on_small_integers(a, b, c):
    """Associativity and distributivity hold exactly for small-integer coeffs."""
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


# ---------------------------------------------------------------------------
# Complex evaluation and even polynomials
# ---------------------------------------------------------------------------


def test_eval_complex_examples():
    p = Polynomial([1.0, 1.0, 1.0])  # s^2 + s + 1
    assert eval_complex(p, 1j) == pytest.approx(1j, abs=1e-15)
    assert eval_complex(Polynomial([1.0]), 3 + 4j) == 1.0
    assert eval_complex(Polynomial([1.0, 2.0]), 0.5j) == pytest.approx(
        1 + 1j, abs=1e-15
    )


def test_mag_squared_even_examples():
    # |1 + 2 i w|^2 = 1 + 4 w^2
    assert mag_squared_even(Polynomial([1.0, 2.0])).coeffs == (1.0, 4.0)
    assert mag_squared_even(Polynomial([1.0])).coeffs == (1.0,)
    assert mag_squared_even(Polynomial([0.0, 1.0])).coeffs == (0.0, 1.0)


def test_mag_squared_even_rejects_zero():
    with pytest.raises(DegenerateInputError):
        mag_squared_even(Polynomial())


def test_re_cross_even_examples():
    # Re[(1+2iw)(1-w^2-iw)] = 1 + w^2
    d = re_cross_even(Polynomial([1.0, 2.0]), Polynomial([1.0, 1.0, 1.0]))
    assert d.coeffs == (1.0, 1.0)
    # constant beta against s+alpha: alpha*beta for every w
    d = re_cross_even(Polynomial([3.0]), Polynomial([2.0, 1.0]))
    assert d.coeffs == (6.0,)
    # p = s against s^2+s+1 gives D(x) = x, matching N(x) = x
    d = re_cross_even(Polynomial([0.0, 1.0]), Polynomial([1.0, 1.0, 1.0]))
    assert d.coeffs == (0.0, 1.0)


@st.composite
def random_poly(draw, max_degree=8, scale=5.0):
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    deg = draw(st.integers(min_value=0, max_value=max_degree))
    rng = np.random.default_rng(seed)
    c = rng.uniform(-scale, scale, deg + 1)
    if abs(c[-1]) < 0.1:
        c[-1] = 0.1 if c[-1] >= 0 else -0.1
    return Polynomial(c.tolist())


@given(random_poly())
@settings(max_examples=60, deadline=None)
def test_mag_squared_matches_eval_on_grid(p):
    """N(w^2) agrees with |p(iw)|^2 over 1000 frequencies at rel. 1e-10."""
    n = mag_squared_even(p)
    omegas = np.logspace(-3, 3, 1000)
    for w in omegas:
        direct = abs(eval_complex(p, 1j * w)) ** 2
        via_even = eval_complex(n, w * w).real
        assert via_even == pytest.approx(direct, rel=1e-10, abs=1e-12)


@given(random_poly(max_degree=6), random_poly(max_degree=6))
@settings(max_examples=60, deadline=None)
def test_re_cross_matches_eval_on_grid(p, q):
    d = re_cross_even(p, q)
    omegas = np.logspace(-3, 3, 1000)
    for w in omegas:
        direct = (eval_complex(p, 1j * w) * eval_complex(q, 1j * w).conjugate()).real
        via_even = eval_complex(d, w * w).real
        scale = max(abs(direct), abs(eval_complex(p, 1j * w)) * abs(eval_complex(q, 1j * w)), 1e-12)
        assert abs(via_even - direct) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# Routh-Hurwitz
# ---------------------------------------------------------------------------


def test_routh_second_order_stable():
    v = routh_hurwitz(Polynomial([3.0, 3.0, 1.0]))
    assert v.stable and not v.marginal


def test_routh_marginal_at_secant_boundary():
    # s^3 + 3 s^2 + 3 s + 9: first Routh column hits zero, no sign change
    v = routh_hurwitz(Polynomial([9.0, 3.0, 3.0, 1.0]))
    assert v.marginal and not v.stable


def test_routh_flip_around_boundary():
    assert routh_hurwitz(Polynomial([8.9, 3.0, 3.0, 1.0])).stable
    v = routh_hurwitz(Polynomial([9.1, 3.0, 3.0, 1.0]))
    assert not v.stable and not v.marginal


def test_routh_degree_zero_rejected():
    with pytest.raises(DegenerateInputError):
        routh_hurwitz(Polynomial([5.0]))


def test_routh_negative_leading_sign_normalized():
    v = routh_hurwitz(Polynomial([-3.0, -3.0, -1.0]))
    assert v.stable


def test_routh_all_zero_row_pure_imaginary_pair():
    # (s^2+1)(s+1): imaginary-axis pair triggers the auxiliary-row rule
    v = routh_hurwitz(Polynomial([1.0, 1.0, 1.0, 1.0]))
    assert v.marginal and not v.stable


def test_routh_never_both_stable_and_marginal():
    rng = np.random.default_rng(7)
    for _ in range(200):
        deg = rng.integers(1, 9)
        c = rng.uniform(-3, 3, deg + 1)
        if abs(c[-1]) < 0.1:
            c[-1] = 0.3
        v = routh_hurwitz(Polynomial(c.tolist()))
        assert not (v.stable and v.marginal)


def test_routh_agrees_with_root_oracle():
    """Cross-check against Durand-Kerner roots, axis margin 1e-3."""
    rng = np.random.default_rng(20260819)
    checked = 0
    while checked < 200:
        deg = int(rng.integers(1, 9))
        coeffs = rng.uniform(-4.0, 4.0, deg + 1)
        if abs(coeffs[-1]) < 0.2:
            continue
        m = max_real_part(coeffs.tolist())
        if abs(m) < 1e-3:
            continue
        v = routh_hurwitz(Polynomial(coeffs.tolist()))
        assert v.stable == (m < 0), f"coeffs={coeffs.tolist()} max_re={m}"
        assert not v.marginal
        checked += 1


# ---------------------------------------------------------------------------
# Root isolation
# ---------------------------------------------------------------------------


def test_real_roots_factored_examples():
    assert real_roots_nonneg(Polynomial([2.0, -3.0, 1.0])) == pytest.approx([1.0, 2.0], abs=1e-10)
    assert real_roots_nonneg(Polynomial([1.0, 1.0])) == []
    # x^3 - x: roots 0 and 1, -1 excluded
    assert real_roots_nonneg(Polynomial([0.0, -1.0, 0.0, 1.0])) == pytest.approx(
        [0.0, 1.0], abs=1e-10
    )


def test_real_roots_zero_polynomial_rejected():
    with pytest.raises(DegenerateInputError):
        real_roots_nonneg(Polynomial())


def test_real_roots_constant_has_none():
    assert real_roots_nonneg(Polynomial([3.0])) == []


def test_real_roots_multiple_root_reported_once():
    # (x-2)^2 (x+1)
    p = Polynomial([4.0, -4.0, 1.0]) * Polynomial([1.0, 1.0])
    roots = real_roots_nonneg(p)
    assert roots == pytest.approx([2.0], abs=1e-6)


def test_real_roots_random_products():
    """Every root of prod (x - r_i) with separation >= 1e-4 is found to tol."""
    rng = np.random.default_rng(99)
    for _ in range(40):
        k = int(rng.integers(1, 6))
        while True:
            roots = np.sort(rng.uniform(0.0, 20.0, k))
            if k == 1 or np.min(np.diff(roots)) >= 1e-4:
                break
        p = Polynomial([1.0])
        for r in roots:
            p = p * Polynomial([-float(r), 1.0])
        found = real_roots_nonneg(p, tol=1e-10)
        assert len(found) == k
        for want, got in zip(roots, found):
            assert got == pytest.approx(want, abs=1e-7)


def test_real_roots_negative_roots_excluded():
    p = Polynomial([1.0, 1.0]) * Polynomial([2.0, 1.0]) * Polynomial([-3.0, 1.0])
    assert real_roots_nonneg(p) == pytest.approx([3.0], abs=1e-8)


def test_square_free_and_gcd():
    p = Polynomial([1.0, 1.0])
    q = Polynomial([2.0, 1.0])
    g = poly_gcd(p * p * q, p * q)
    # gcd = (x+1)(x+2) up to the monic normalization
    assert g.degree == 2
    assert eval_complex(g, -1.0) == pytest.approx(0.0, abs=1e-9)
    assert eval_complex(g, -2.0) == pytest.approx(0.0, abs=1e-9)
    sf = square_free(p * p * q)
    assert sf.degree == 2


def test_gcd_coprime_is_constant():
    g = poly_gcd(Polynomial([1.0, 1.0]), Polynomial([2.0, 1.0]))
    assert g.degree == 0


# ---------------------------------------------------------------------------
# RationalTransfer
# ---------------------------------------------------------------------------


def test_rational_monic_normalization():
    g = RationalTransfer([2.0], [4.0, 2.0])
    assert g.den.coeffs == (2.0, 1.0)
    assert g.num.coeffs == (1.0,)


def test_rational_rejects_improper():
    with pytest.raises(DegenerateInputError):
        RationalTransfer([1.0, 1.0], [1.0, 1.0])
    with pytest.raises(DegenerateInputError):
        RationalTransfer([1.0, 0.0, 2.0], [1.0, 1.0])


def test_rational_rejects_constant_denominator():
    with pytest.raises(DegenerateInputError):
        RationalTransfer([1.0], [2.0])


def test_rational_rejects_shared_root():
    num = Polynomial([1.0, 1.0])
    den = Polynomial([1.0, 1.0]) * Polynomial([2.0, 1.0])
    with pytest.raises(DegenerateInputError):
        RationalTransfer(num, den)


def test_rational_zero_numerator_allowed():
    g = RationalTransfer([0.0], [1.0, 1.0])
    assert g.num.is_zero
    assert g.relative_degree == 1


def test_rational_call_and_relative_degree():
    g = RationalTransfer([1.0, 2.0], [1.0, 1.0, 1.0])
    assert g.relative_degree == 1
    # G(i) = (1+2i)/i = 2 - i
    assert g(1j) == pytest.approx(2 - 1j, abs=1e-14)


def test_rational_from_text():
    g = RationalTransfer.from_text("1,2", "1,1,1")
    assert g.num.coeffs == (1.0, 2.0)
    assert g.den.coeffs == (1.0, 1.0, 1.0)


def test_durand_kerner_oracle_sanity():
    # the oracle itself: roots of (s+1)(s+2)(s+3)
    roots = sorted(r.real for r in durand_kerner_roots([6.0, 11.0, 6.0, 1.0]))
    assert roots == pytest.approx([-3.0, -2.0, -1.0], abs=1e-9)
