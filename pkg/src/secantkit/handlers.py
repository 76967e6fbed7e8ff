"""Analysis entry points shared by the HTTP service and the CLI.

Each handler converts a request model into core-library calls and wraps the
result in the matching response model. Domain errors propagate as the core
exception types; the callers translate them (HTTP status codes for the
service, exit codes for the CLI).
"""

from __future__ import annotations

import math

import numpy as np

from .cascade import (
    CascadeSpec,
    check_secant_condition,
    closed_loop_stable,
    cyclic_char_poly,
    cyclic_matrix_hurwitz,
    secant_threshold,
)
from .errors import DegenerateInputError, SimulationDivergedError
from .nyquist import build_nyquist_data, render_nyquist_csv, render_nyquist_svg
from .passivity import (
    LinearGain,
    MichaelisMenten,
    hinf_gain,
    is_osp,
    is_spr,
    secant_gain,
)
from .poly import Polynomial, RationalTransfer
from .schemas import (
    BlockModel,
    CascadeRequest,
    CascadeResponse,
    ExtendedReal,
    GainBlockModel,
    GainRequest,
    GainResponse,
    MatrixRequest,
    MatrixResponse,
    MichaelisMentenBlockModel,
    NyquistRequest,
    NyquistResponse,
    OspView,
    RationalBlockModel,
    ScenarioModel,
    SignalModel,
    SimulateRequest,
    SimulateResponse,
    SimulateSummary,
    SprRequest,
    SprResponse,
    SprView,
    TransferInput,
    ViolationPoint,
)
from .simulate import (
    WELL_POSEDNESS_NOTE,
    Signal,
    l2_norm_T,
    simulate_closed_loop,
)

__all__ = [
    "handle_gain",
    "handle_spr",
    "handle_cascade",
    "handle_matrix",
    "handle_simulate",
    "handle_nyquist",
    "block_from_model",
    "block_to_model",
    "signal_from_scenario",
]


def _transfer(num: list[float], den: list[float]) -> RationalTransfer:
    return RationalTransfer(Polynomial(num), Polynomial(den))


def block_from_model(m: BlockModel):
    if isinstance(m, RationalBlockModel):
        return _transfer(m.num, m.den)
    if isinstance(m, MichaelisMentenBlockModel):
        return MichaelisMenten(V=m.V, K=m.K, a=m.a)
    return LinearGain(k=m.k)


def block_to_model(b) -> BlockModel:
    if isinstance(b, RationalTransfer):
        return RationalBlockModel(num=list(b.num.coeffs), den=list(b.den.coeffs))
    if isinstance(b, MichaelisMenten):
        return MichaelisMentenBlockModel(V=b.V, K=b.K, a=b.a)
    return GainBlockModel(k=b.k)


def handle_gain(req: GainRequest) -> GainResponse:
    G = _transfer(req.num, req.den)
    cert = secant_gain(G)
    hcert = hinf_gain(G)
    osp_view = spr_view = None
    if req.full:
        status = is_osp(G)
        osp_view = OspView(holds=status.holds, status=status.name)
        verdict = is_spr(G)
        spr_view = SprView(
            is_spr=verdict.is_spr,
            failed=None if verdict.failed is None else verdict.failed.name,
        )
    return GainResponse(
        input=TransferInput(num=req.num, den=req.den),
        secant_gain=ExtendedReal.wrap(cert.gamma),
        attained_at_infinity=cert.attained_at_infinity,
        witness_omega=cert.witness_omega,
        degenerate=cert.degenerate,
        reason=cert.reason,
        hinf_gain=ExtendedReal.wrap(hcert.gamma),
        hinf_witness_omega=hcert.witness_omega,
        osp=osp_view,
        spr=spr_view,
    )


def handle_spr(req: SprRequest) -> SprResponse:
    verdict = is_spr(_transfer(req.num, req.den))
    return SprResponse(
        input=TransferInput(num=req.num, den=req.den),
        is_spr=verdict.is_spr,
        failed=None if verdict.failed is None else verdict.failed.name,
    )


def handle_cascade(req: CascadeRequest) -> CascadeResponse:
    blocks = [block_from_model(m) for m in req.blocks]
    spec = CascadeSpec(blocks)
    verdict = check_secant_condition(spec)
    loop_stable = None
    if all(isinstance(b, RationalTransfer) for b in blocks):
        loop_stable = closed_loop_stable(blocks)
    return CascadeResponse(
        blocks=[block_to_model(b) for b in blocks],
        gains=list(verdict.gains),
        product_gain=verdict.product_gain,
        threshold=ExtendedReal.wrap(verdict.threshold),
        passes=verdict.passes,
        boundary=verdict.boundary,
        margin=ExtendedReal.wrap(verdict.margin),
        closed_loop_stable=loop_stable,
    )


def handle_matrix(req: MatrixRequest) -> MatrixResponse:
    verdict = cyclic_matrix_hurwitz(req.alphas, req.betas)
    cp = cyclic_char_poly(req.alphas, req.betas)
    product = math.prod(b / a for a, b in zip(req.alphas, req.betas))
    threshold = secant_threshold(len(req.alphas))
    boundary = (
        math.isfinite(threshold)
        and abs(product - threshold) <= 1e-9 * max(1.0, threshold)
    )
    if verdict.stable:
        text = "stable"
    elif verdict.marginal:
        text = "marginal (at secant boundary)" if boundary else "marginal"
    else:
        text = "unstable"
    return MatrixResponse(
        alphas=list(req.alphas),
        betas=list(req.betas),
        stable=verdict.stable,
        marginal=verdict.marginal,
        char_poly=list(cp.coeffs),
        gain_product=product,
        threshold=ExtendedReal.wrap(threshold),
        at_secant_boundary=boundary,
        verdict=text,
    )


def signal_from_scenario(sc: ScenarioModel) -> Signal:
    spec = sc.input
    kind = spec.type
    if kind == "step":
        return Signal.step(sc.T, sc.dt, amplitude=spec.amplitude)
    if kind == "pulse":
        return Signal.pulse(sc.T, sc.dt, amplitude=spec.amplitude, width=spec.width)
    if kind == "sinusoids":
        rng = np.random.default_rng(spec.seed)
        return Signal.sum_of_sinusoids(
            sc.T,
            sc.dt,
            rng,
            n_components=spec.n_components,
            freq_range=(spec.freq_lo, spec.freq_hi),
        )
    if kind == "chirp":
        return Signal.chirp(
            sc.T,
            sc.dt,
            spec.omega0,
            spec.omega1,
            amplitude=spec.amplitude,
            taper=spec.taper,
        )
    if kind == "samples":
        sig = Signal(spec.samples, sc.dt)
    else:  # csv
        sig = Signal.from_csv(spec.path)
        if abs(sig.dt - sc.dt) > 1e-12 * max(sig.dt, sc.dt):
            raise DegenerateInputError(
                f"scenario dt = {sc.dt:g} but CSV dt = {sig.dt:g}"
            )
    if sc.T > sig.duration + 1e-9 * sig.dt:
        raise DegenerateInputError(
            f"scenario T = {sc.T:g} exceeds input duration {sig.duration:g}"
        )
    return sig


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    sc = req.scenario
    blocks = [block_from_model(m) for m in sc.blocks]
    u = signal_from_scenario(sc)
    diverged = False
    t_abort = None
    try:
        outputs = simulate_closed_loop(blocks, u, zero_init=True)
    except SimulationDivergedError as exc:
        diverged = True
        t_abort = exc.t_abort
        outputs = exc.partial_outputs
    T_eff = min(sig.duration for sig in outputs + [u])
    input_norm = l2_norm_T(u, T_eff)
    norms = [l2_norm_T(y, T_eff) for y in outputs]
    ratio = norms[-1] / input_norm if input_norm >= 1e-12 else None
    summary = SimulateSummary(
        T=sc.T,
        dt=u.dt,
        diverged=diverged,
        t_abort=t_abort,
        l2_norms=norms,
        final_values=[float(y.samples[-1]) for y in outputs],
        input_l2_norm=input_norm,
        max_gain_ratio=ratio,
        assumptions=[WELL_POSEDNESS_NOTE],
    )
    return SimulateResponse(
        scenario=sc,
        outputs=[SignalModel(dt=y.dt, samples=[float(v) for v in y.samples]) for y in outputs],
        input_signal=SignalModel(dt=u.dt, samples=[float(v) for v in u.samples]),
        summary=summary,
    )


def handle_nyquist(req: NyquistRequest) -> NyquistResponse:
    G = _transfer(req.num, req.den)
    data = build_nyquist_data(G, req.gamma)
    return NyquistResponse(
        input=TransferInput(num=req.num, den=req.den),
        gamma=ExtendedReal.wrap(data.gamma),
        gamma_is_default=data.gamma_is_default,
        n_points=len(data.omegas),
        violations=[
            ViolationPoint(omega=w, re=x, im=y, excess=e)
            for w, x, y, e in data.violations
        ],
        csv=render_nyquist_csv(data),
        svg=render_nyquist_svg(data),
    )
