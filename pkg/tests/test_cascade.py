"""Tests for secant-condition certificates and closed-loop pole checks."""

import math

import numpy as np
import pytest

from secantkit.cascade import (
    CascadeSpec,
    cascade_from_json,
    cascade_to_json,
    check_secant_condition,
    closed_loop_char_poly,
    closed_loop_stable,
    cyclic_char_poly,
    cyclic_matrix_hurwitz,
    secant_threshold,
)
from secantkit.errors import (
    DegenerateInputError,
    InfiniteGainError,
    NotStableError,
)
from secantkit.passivity import LinearGain, MichaelisMenten
from secantkit.poly import RationalTransfer

from oracles import charpoly_by_interpolation, cyclic_matrix


def first_order(beta, alpha):
    return RationalTransfer([beta], [alpha, 1.0])


# ---------------------------------------------------------------------------
# secant_threshold
# ---------------------------------------------------------------------------


def test_threshold_small_n():
    assert secant_threshold(3) == pytest.approx(8.0, abs=1e-12)
    assert secant_threshold(4) == pytest.approx(4.0, abs=1e-12)
    assert 2.880 <= secant_threshold(5) <= 2.890
    assert math.isinf(secant_threshold(1))
    assert math.isinf(secant_threshold(2))


def test_threshold_domain():
    with pytest.raises(DegenerateInputError):
        secant_threshold(0)
    with pytest.raises(DegenerateInputError):
        secant_threshold(-3)
    with pytest.raises(DegenerateInputError):
        secant_threshold(3.0)


def test_threshold_monotone_to_one():
    prev = secant_threshold(3)
    for n in range(4, 10001):
        cur = secant_threshold(n)
        assert cur < prev
        prev = cur
    assert secant_threshold(10000) < 1.01
    assert secant_threshold(10000) > 1.0


# ---------------------------------------------------------------------------
# check_secant_condition
# ---------------------------------------------------------------------------


def test_secant_condition_three_small_blocks_pass():
    spec = CascadeSpec([first_order(1.9, 1.0)] * 3)
    v = check_secant_condition(spec)
    assert v.passes
    assert v.product_gain == pytest.approx(6.859, rel=1e-12)
    assert v.threshold == pytest.approx(8.0, abs=1e-12)
    assert v.margin == pytest.approx(8.0 - 6.859, rel=1e-9)
    assert v.gains == pytest.approx((1.9, 1.9, 1.9), rel=1e-12)
    assert not v.boundary


def test_secant_condition_three_large_blocks_fail():
    spec = CascadeSpec([first_order(2.1, 1.0)] * 3)
    v = check_secant_condition(spec)
    assert not v.passes
    assert v.product_gain == pytest.approx(9.261, rel=1e-12)
    assert v.margin < 0


def test_secant_condition_two_blocks_always_pass():
    spec = CascadeSpec([first_order(50.0, 1.0), first_order(50.0, 1.0)])
    v = check_secant_condition(spec)
    assert v.passes
    assert math.isinf(v.threshold)
    assert math.isinf(v.margin)


def test_secant_condition_passes_iff_product_below_threshold():
    for gains in [(1.9, 1.9, 1.9), (2.1, 2.1, 2.1), (7.9, 1.0, 1.0), (8.1, 1.0, 1.0)]:
        spec = CascadeSpec([first_order(g, 1.0) for g in gains])
        v = check_secant_condition(spec)
        assert v.passes == (v.product_gain < v.threshold)


def test_secant_condition_mixed_static_blocks():
    spec = CascadeSpec(
        [first_order(1.5, 1.0), MichaelisMenten(V=2.0, K=1.0), LinearGain(2.0)]
    )
    v = check_secant_condition(spec)
    assert v.gains == pytest.approx((1.5, 2.0, 2.0), rel=1e-12)
    assert v.product_gain == pytest.approx(6.0, rel=1e-12)
    assert v.passes


def test_secant_condition_gain_override():
    spec = CascadeSpec([first_order(1.9, 1.0)] * 3)
    v = check_secant_condition(spec, gains_override=(2.0, 2.0, 2.0))
    assert v.product_gain == pytest.approx(8.0, abs=1e-12)
    assert v.boundary
    assert not v.passes


def test_secant_condition_override_validation():
    spec = CascadeSpec([first_order(1.9, 1.0)] * 3)
    with pytest.raises(DegenerateInputError):
        check_secant_condition(spec, gains_override=(2.0, 2.0))
    with pytest.raises(DegenerateInputError):
        check_secant_condition(spec, gains_override=(2.0, -1.0, 2.0))
    with pytest.raises(DegenerateInputError):
        check_secant_condition(spec, gains_override=(2.0, math.inf, 2.0))


def test_secant_condition_infinite_block_gain():
    # relative degree two: no finite secant gain
    spec = CascadeSpec([RationalTransfer([1.0], [1.0, 1.0, 1.0])])
    with pytest.raises(InfiniteGainError):
        check_secant_condition(spec)


def test_cascade_spec_validation():
    with pytest.raises(DegenerateInputError):
        CascadeSpec([])
    with pytest.raises(NotStableError):
        CascadeSpec([RationalTransfer([1.0], [-1.0, 1.0])])
    with pytest.raises(DegenerateInputError):
        CascadeSpec([first_order(1.0, 1.0), "not a block"])
    spec = CascadeSpec([first_order(1.0, 1.0), LinearGain(2.0)])
    assert len(spec) == 2
    assert all(b is not None for b in spec)


# ---------------------------------------------------------------------------
# cyclic matrices
# ---------------------------------------------------------------------------


def test_cyclic_char_poly_examples():
    assert cyclic_char_poly([1.0, 2.0], [1.0, 1.0]).coeffs == (3.0, 3.0, 1.0)
    assert cyclic_char_poly([1.0, 1.0, 1.0], [2.0, 2.0, 2.0]).coeffs == (
        9.0,
        3.0,
        3.0,
        1.0,
    )
    assert cyclic_char_poly([1.5], [0.5]).coeffs == (2.0, 1.0)


def test_cyclic_char_poly_validation():
    with pytest.raises(DegenerateInputError):
        cyclic_char_poly([1.0, 2.0], [1.0])
    with pytest.raises(DegenerateInputError):
        cyclic_char_poly([], [])
    with pytest.raises(DegenerateInputError):
        cyclic_char_poly([1.0, -2.0], [1.0, 1.0])
    with pytest.raises(DegenerateInputError):
        cyclic_char_poly([1.0, 2.0], [0.0, 1.0])


def test_cyclic_char_poly_matches_matrix_oracle():
    """Coefficients agree with interpolated det(sI - A) for the actual matrix."""
    rng = np.random.default_rng(2718)
    for _ in range(30):
        n = int(rng.integers(1, 7))
        alphas = rng.uniform(0.2, 5.0, n)
        betas = rng.uniform(0.2, 5.0, n)
        got = cyclic_char_poly(alphas, betas).coeffs
        want = charpoly_by_interpolation(cyclic_matrix(alphas, betas))
        assert len(got) == len(want)
        for g, w in zip(got, want):
            assert g == pytest.approx(w, rel=1e-9, abs=1e-9)


def test_cyclic_matrix_hurwitz_boundary():
    b = 7.9 ** (1.0 / 3.0)
    assert cyclic_matrix_hurwitz([1.0, 1.0, 1.0], [b, b, b]).stable
    b = 8.1 ** (1.0 / 3.0)
    v = cyclic_matrix_hurwitz([1.0, 1.0, 1.0], [b, b, b])
    assert not v.stable and not v.marginal


def test_cyclic_matrix_two_blocks_always_stable():
    rng = np.random.default_rng(5)
    for _ in range(50):
        alphas = rng.uniform(0.01, 100.0, 2)
        betas = rng.uniform(0.01, 100.0, 2)
        assert cyclic_matrix_hurwitz(alphas, betas).stable


def test_cyclic_matrix_scale_invariance():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(3, 7))
        alphas = rng.uniform(0.2, 5.0, n)
        betas = rng.uniform(0.2, 5.0, n)
        c = rng.uniform(0.01, 100.0)
        base = cyclic_matrix_hurwitz(alphas, betas)
        scaled = cyclic_matrix_hurwitz(c * alphas, c * betas)
        assert scaled.stable == base.stable


def test_cyclic_sharpness_near_threshold_n3():
    """Equal-alpha flip happens at product 8 (finer bisection in acceptance)."""
    for product, want_stable in [(8.0 - 1e-4, True), (8.0 + 1e-4, False)]:
        b = product ** (1.0 / 3.0)
        v = cyclic_matrix_hurwitz([1.0, 1.0, 1.0], [b, b, b])
        assert v.stable == want_stable


# ---------------------------------------------------------------------------
# closed-loop pole test
# ---------------------------------------------------------------------------


def test_closed_loop_char_poly_examples():
    assert closed_loop_char_poly([first_order(2.0, 3.0)]).coeffs == (5.0, 1.0)
    p = closed_loop_char_poly([first_order(1.9, 1.0)] * 3)
    assert p.coeffs == pytest.approx((1.0 + 1.9**3, 3.0, 3.0, 1.0), rel=1e-12)
    p = closed_loop_char_poly([first_order(1.0, 1.0), first_order(2.0, 2.0)])
    assert p.coeffs == (4.0, 3.0, 1.0)


def test_closed_loop_char_poly_rejects_static_and_empty():
    with pytest.raises(DegenerateInputError):
        closed_loop_char_poly([])
    with pytest.raises(DegenerateInputError):
        closed_loop_char_poly([first_order(1.0, 1.0), LinearGain(2.0)])


def test_closed_loop_stable_examples():
    assert closed_loop_stable([first_order(1.9, 1.0)] * 3)
    assert not closed_loop_stable([first_order(2.1, 1.0)] * 3)
    assert closed_loop_stable([first_order(100.0, 0.1)])


def test_secant_pass_implies_stable_random_cascades():
    """Constructive soundness suite (full 500-instance run in acceptance)."""
    rng = np.random.default_rng(60)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        thr = secant_threshold(n)
        cap = thr if math.isfinite(thr) else 50.0
        gammas = cap ** (1.0 / n) * rng.uniform(0.05, 1.0, n)
        alphas = rng.uniform(0.1, 10.0, n)
        blocks = [first_order(g * a, a) for g, a in zip(gammas, alphas)]
        v = check_secant_condition(CascadeSpec(blocks))
        assert v.passes
        assert closed_loop_stable(blocks)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def test_cascade_json_round_trip():
    spec = CascadeSpec(
        [
            first_order(1.9, 1.0),
            MichaelisMenten(V=2.0, K=1.0, a=0.5),
            LinearGain(3.0),
        ]
    )
    data = cascade_to_json(spec)
    back = cascade_from_json(data)
    assert len(back) == 3
    assert back.blocks[0] == spec.blocks[0]
    assert back.blocks[1] == spec.blocks[1]
    assert back.blocks[2] == spec.blocks[2]


def test_cascade_json_schema():
    data = cascade_to_json(CascadeSpec([first_order(1.9, 1.0)]))
    assert data == {"blocks": [{"type": "rational", "num": [1.9], "den": [1.0, 1.0]}]}


def test_cascade_json_malformed():
    with pytest.raises(DegenerateInputError):
        cascade_from_json({"no_blocks": []})
    with pytest.raises(DegenerateInputError):
        cascade_from_json({"blocks": "oops"})
    with pytest.raises(DegenerateInputError):
        cascade_from_json({"blocks": [{"type": "mystery"}]})
    with pytest.raises(DegenerateInputError):
        cascade_from_json({"blocks": [{"type": "mm", "V": 1.0}]})
    with pytest.raises(DegenerateInputError):
        cascade_from_json({"blocks": [{"type": "rational", "num": [1.0]}]})
    with pytest.raises(DegenerateInputError):
        cascade_from_json({"blocks": [{"type": "gain", "k": "three"}]})
