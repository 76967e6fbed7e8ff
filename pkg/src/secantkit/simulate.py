"""Time-domain simulation and empirical passivity checks.

Fixed-step classical Runge-Kutta (RK4) drives cascades of linear state-space
blocks and static nonlinearities under unity negative feedback. Static
blocks are evaluated pointwise inside every integrator stage; every dynamic
block has no feedthrough, so any one of them breaks the algebraic loop.
Truncated L2 functionals (norms, inner products, angles) use trapezoidal
quadrature on the sample grid, and the empirical passivity verdicts carry a
discretization slack proportional to the input energy.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlgebraicLoopError,
    ConvergenceError,
    DegenerateInputError,
    SimulationDivergedError,
)
from .passivity import (
    LinearGain,
    MichaelisMenten,
    StaticNonlinearity,
    secant_gain,
    static_gain,
)
from .poly import RationalTransfer

__all__ = [
    "Signal",
    "FirstOrderBlock",
    "LinearBlockSS",
    "BlockInstance",
    "realize",
    "simulate_closed_loop",
    "simulate_open_loop",
    "l2_norm_T",
    "inner_product_T",
    "angle_T",
    "verify_osp_empirically",
    "OspEmpiricalReport",
    "empirical_gain_ratio",
    "GainRatioReport",
    "ShiftedSystem",
    "shift_equilibrium",
    "find_inhibitory_equilibrium",
]

DEFAULT_DT = 1e-3
STATE_BOUND = 1e12

WELL_POSEDNESS_NOTE = (
    "closed-loop well-posedness (existence/uniqueness of trajectories) is "
    "assumed; the integrator detects state blow-up but cannot certify it"
)


class Signal:
    """Uniformly sampled scalar signal with step ``dt`` starting at t = 0."""

    __slots__ = ("samples", "dt")

    def __init__(self, samples, dt: float = DEFAULT_DT):
        arr = np.array(samples, dtype=float, copy=True)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise DegenerateInputError("signal needs at least two samples")
        if not np.all(np.isfinite(arr)):
            raise DegenerateInputError("signal samples must be finite")
        if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
            raise DegenerateInputError("dt must be positive and finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "dt", float(dt))

    def __setattr__(self, name, value):
        raise AttributeError("Signal is immutable")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return (len(self) - 1) * self.dt

    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    # -- generators ---------------------------------------------------------

    @classmethod
    def step(cls, T: float, dt: float = DEFAULT_DT, amplitude: float = 1.0) -> "Signal":
        n = int(round(T / dt)) + 1
        return cls(np.full(n, amplitude), dt)

    @classmethod
    def pulse(
        cls,
        T: float,
        dt: float = DEFAULT_DT,
        amplitude: float = 1.0,
        width: float = 1.0,
    ) -> "Signal":
        n = int(round(T / dt)) + 1
        t = np.arange(n) * dt
        return cls(np.where(t < width, amplitude, 0.0), dt)

    @classmethod
    def sum_of_sinusoids(
        cls,
        T: float,
        dt: float,
        rng: np.random.Generator,
        n_components: int = 8,
        freq_range: tuple[float, float] = (1e-2, 1e2),
    ) -> "Signal":
        """Sum of ``n_components`` sinusoids, log-uniform frequencies (rad/s),
        standard normal amplitudes, uniform phases."""
        lo, hi = freq_range
        w = np.exp(rng.uniform(math.log(lo), math.log(hi), n_components))
        a = rng.standard_normal(n_components)
        phi = rng.uniform(0.0, 2.0 * math.pi, n_components)
        t = np.arange(int(round(T / dt)) + 1) * dt
        u = np.zeros_like(t)
        for wi, ai, pi in zip(w, a, phi):
            u += ai * np.sin(wi * t + pi)
        return cls(u, dt)

    @classmethod
    def chirp(
        cls,
        T: float,
        dt: float,
        omega0: float,
        omega1: float,
        amplitude: float = 1.0,
        taper: float = 0.1,
    ) -> "Signal":
        """Linear frequency sweep ``omega0 -> omega1`` with raised-cosine
        edge tapers covering ``taper`` of the duration at each end."""
        t = np.arange(int(round(T / dt)) + 1) * dt
        phase = omega0 * t + (omega1 - omega0) * t * t / (2.0 * T)
        u = amplitude * np.sin(phase)
        if taper > 0:
            edge = taper * T
            ramp = np.clip(t / edge, 0.0, 1.0) * np.clip((T - t) / edge, 0.0, 1.0)
            window = 0.5 * (1.0 - np.cos(math.pi * np.clip(ramp, 0.0, 1.0)))
            u = u * window
        return cls(u, dt)

    # -- CSV ----------------------------------------------------------------

    def to_csv(self, path) -> None:
        """Write ``t,value`` rows with a header line."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t, v in zip(self.times(), self.samples):
                w.writerow([repr(float(t)), repr(float(v))])

    @classmethod
    def from_csv(cls, path) -> "Signal":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["t", "value"]:
                raise DegenerateInputError('signal CSV must start with header "t,value"')
            ts, vs = [], []
            for row in reader:
                if not row:
                    continue
                if len(row) != 2:
                    raise DegenerateInputError(f"malformed signal row: {row!r}")
                ts.append(float(row[0]))
                vs.append(float(row[1]))
        if len(ts) < 2:
            raise DegenerateInputError("signal CSV needs at least two rows")
        dt = ts[1] - ts[0]
        if abs(ts[0]) > 1e-12 or dt <= 0:
            raise DegenerateInputError("signal CSV must start at t = 0 with dt > 0")
        for i in range(1, len(ts)):
            if abs(ts[i] - i * dt) > 1e-9 * max(1.0, abs(ts[i])):
                raise DegenerateInputError("signal CSV must be uniformly sampled")
        return cls(np.array(vs), dt)


@dataclass(frozen=True)
class FirstOrderBlock:
    """Lag ``beta / (s + alpha)`` realized as ``x' = -alpha x + beta u, y = x``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DegenerateInputError("first-order block needs alpha > 0 and beta > 0")


class LinearBlockSS:
    """State-space block ``x' = A x + B u, y = C x`` (no feedthrough by type)."""

    __slots__ = ("A", "B", "C")

    def __init__(self, A, B, C):
        A = np.array(A, dtype=float)
        B = np.array(B, dtype=float).reshape(-1)
        C = np.array(C, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DegenerateInputError("A must be square")
        n = A.shape[0]
        if B.shape != (n,) or C.shape != (n,):
            raise DegenerateInputError("B and C must have length matching A")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B)) and np.all(np.isfinite(C))):
            raise DegenerateInputError("state-space matrices must be finite")
        for m in (A, B, C):
            m.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    def __setattr__(self, name, value):
        raise AttributeError("LinearBlockSS is immutable")

    @property
    def order(self) -> int:
        return self.A.shape[0]


BlockInstance = FirstOrderBlock | LinearBlockSS | MichaelisMenten | LinearGain


def realize(G: RationalTransfer) -> LinearBlockSS:
    """Controllable canonical state-space realization of a strictly proper G."""
    n = G.den.degree
    a = G.den.coeffs  # monic: a[n] == 1
    b = list(G.num.coeffs) + [0.0] * (n - len(G.num.coeffs))
    A = np.zeros((n, n))
    for i in range(n - 1):
        A[i, i + 1] = 1.0
    A[n - 1, :] = [-a[k] for k in range(n)]
    B = np.zeros(n)
    B[n - 1] = 1.0
    return LinearBlockSS(A, B, np.array(b[:n]))


def _normalize_block(b) -> BlockInstance:
    if isinstance(b, RationalTransfer):
        if b.den.degree == 1 and not b.num.is_zero and b.num.degree == 0:
            alpha, beta = b.den.coeffs[0], b.num.coeffs[0]
            if alpha > 0 and beta > 0:
                return FirstOrderBlock(alpha, beta)
        return realize(b)
    if isinstance(b, (FirstOrderBlock, LinearBlockSS, MichaelisMenten, LinearGain)):
        return b
    raise DegenerateInputError(f"unsupported block type: {type(b).__name__}")


def _is_dynamic(b) -> bool:
    return isinstance(b, (FirstOrderBlock, LinearBlockSS))


def _zero_state(b):
    if isinstance(b, FirstOrderBlock):
        return 0.0
    if isinstance(b, LinearBlockSS):
        return np.zeros(b.order)
    return None


class _LoopStepper:
    # Composite RK4 stepper for a feedback cascade. States are floats for
    # first-order blocks and 1-D arrays for general state-space blocks.

    def __init__(self, blocks, states):
        self.blocks = blocks
        self.states = states
        self.first_dyn = next(
            (i for i, b in enumerate(blocks) if _is_dynamic(b)), None
        )
        if self.first_dyn is None:
            raise AlgebraicLoopError(
                "feedback loop closes through static blocks only"
            )

    def outputs_and_error(self, states, u_val):
        blocks = self.blocks
        n = len(blocks)
        ys: list[float] = [0.0] * n
        k = self.first_dyn
        for i in range(k, n):
            b = blocks[i]
            if isinstance(b, FirstOrderBlock):
                ys[i] = states[i]
            elif isinstance(b, LinearBlockSS):
                ys[i] = float(b.C @ states[i])
            else:
                ys[i] = b(ys[i - 1])
        e = u_val - ys[n - 1]
        prev = e
        for i in range(k):
            ys[i] = blocks[i](prev)
            prev = ys[i]
        return ys, e

    def derivs(self, states, u_val):
        ys, e = self.outputs_and_error(states, u_val)
        blocks = self.blocks
        out = [None] * len(blocks)
        for i, b in enumerate(blocks):
            v = e if i == 0 else ys[i - 1]
            if isinstance(b, FirstOrderBlock):
                out[i] = -b.alpha * states[i] + b.beta * v
            elif isinstance(b, LinearBlockSS):
                out[i] = b.A @ states[i] + b.B * v
        return out

    @staticmethod
    def _advance(states, ks, h):
        out = []
        for s, k in zip(states, ks):
            out.append(s if k is None else s + h * k)
        return out

    def rk4_step(self, u0, um, u1, dt):
        s = self.states
        k1 = self.derivs(s, u0)
        k2 = self.derivs(self._advance(s, k1, 0.5 * dt), um)
        k3 = self.derivs(self._advance(s, k2, 0.5 * dt), um)
        k4 = self.derivs(self._advance(s, k3, dt), u1)
        new = []
        for x, a, b, c, d in zip(s, k1, k2, k3, k4):
            if a is None:
                new.append(x)
            else:
                new.append(x + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d))
        self.states = new

    def max_abs_state(self) -> float:
        m = 0.0
        for s in self.states:
            if s is None:
                continue
            if isinstance(s, float):
                m = max(m, abs(s))
            else:
                m = max(m, float(np.max(np.abs(s))))
        return m


def _prepare_states(blocks, zero_init, initial_states):
    states = []
    for i, b in enumerate(blocks):
        z = _zero_state(b)
        if z is None:
            states.append(None)
            continue
        if zero_init or initial_states is None:
            states.append(z)
        else:
            s0 = initial_states[i]
            if isinstance(b, FirstOrderBlock):
                states.append(float(np.asarray(s0).reshape(())))
            else:
                arr = np.array(s0, dtype=float).reshape(-1)
                if arr.shape != (b.order,):
                    raise DegenerateInputError(
                        f"initial state {i + 1} has wrong dimension"
                    )
                states.append(arr)
    return states


def simulate_closed_loop(
    blocks,
    u: Signal,
    zero_init: bool = True,
    initial_states=None,
    state_bound: float = STATE_BOUND,
) -> list[Signal]:
    """Simulate the unity-negative-feedback cascade driven by ``u``.

    Returns one output signal per block, sampled on the input grid. The
    integrator is classical RK4 at the signal step; mid-stage input values
    are linear interpolations. Any state magnitude above ``state_bound``
    aborts with SimulationDivergedError carrying the partial outputs.
    Requires at least one dynamic block; OSP checks need ``zero_init``.
    """
    blocks = [_normalize_block(b) for b in blocks]
    if not blocks:
        raise DegenerateInputError("cascade needs at least one block")
    stepper = _LoopStepper(blocks, _prepare_states(blocks, zero_init, initial_states))
    uv = u.samples
    n_samp = len(uv)
    um = 0.5 * (uv[:-1] + uv[1:])
    outs = [np.empty(n_samp) for _ in blocks]
    dt = u.dt
    for k in range(n_samp):
        ys, _ = stepper.outputs_and_error(stepper.states, uv[k])
        for j, y in enumerate(ys):
            outs[j][k] = y
        if k == n_samp - 1:
            break
        stepper.rk4_step(uv[k], um[k], uv[k + 1], dt)
        if stepper.max_abs_state() > state_bound:
            partial = [Signal(o[: k + 2], dt) for o in outs]
            raise SimulationDivergedError(
                f"state exceeded {state_bound:g} at t = {(k + 1) * dt:.6g}",
                t_abort=(k + 1) * dt,
                partial_outputs=partial,
            )
    return [Signal(o, dt) for o in outs]


def simulate_open_loop(
    block,
    u: Signal,
    zero_init: bool = True,
    initial_state=None,
    state_bound: float = STATE_BOUND,
) -> Signal:
    """Drive a single block with ``u`` (no feedback) and return its output."""
    b = _normalize_block(block)
    uv = u.samples
    dt = u.dt
    n_samp = len(uv)
    if not _is_dynamic(b):
        return Signal(np.array([b(v) for v in uv]), dt)

    um = 0.5 * (uv[:-1] + uv[1:])
    out = np.empty(n_samp)
    if isinstance(b, FirstOrderBlock):
        x = 0.0 if (zero_init or initial_state is None) else float(initial_state)
        al, be = b.alpha, b.beta
        for k in range(n_samp):
            out[k] = x
            if k == n_samp - 1:
                break
            u0, umid, u1 = uv[k], um[k], uv[k + 1]
            k1 = -al * x + be * u0
            x2 = x + 0.5 * dt * k1
            k2 = -al * x2 + be * umid
            x3 = x + 0.5 * dt * k2
            k3 = -al * x3 + be * umid
            x4 = x + dt * k3
            k4 = -al * x4 + be * u1
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if abs(x) > state_bound:
                raise SimulationDivergedError(
                    f"state exceeded {state_bound:g} at t = {(k + 1) * dt:.6g}",
                    t_abort=(k + 1) * dt,
                    partial_outputs=[Signal(out[: k + 2], dt)],
                )
        return Signal(out, dt)

    x = (
        np.zeros(b.order)
        if (zero_init or initial_state is None)
        else np.array(initial_state, dtype=float).reshape(-1)
    )
    A, B, C = b.A, b.B, b.C
    for k in range(n_samp):
        out[k] = float(C @ x)
        if k == n_samp - 1:
            break
        u0, umid, u1 = uv[k], um[k], uv[k + 1]
        k1 = A @ x + B * u0
        k2 = A @ (x + 0.5 * dt * k1) + B * umid
        k3 = A @ (x + 0.5 * dt * k2) + B * umid
        k4 = A @ (x + dt * k3) + B * u1
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if float(np.max(np.abs(x))) > state_bound:
            raise SimulationDivergedError(
                f"state exceeded {state_bound:g} at t = {(k + 1) * dt:.6g}",
                t_abort=(k + 1) * dt,
                partial_outputs=[Signal(out[: k + 2], dt)],
            )
    return Signal(out, dt)


# ---------------------------------------------------------------------------
# Truncated L2 functionals
# ---------------------------------------------------------------------------


def _index_for(sig: Signal, T: float) -> int:
    if not (math.isfinite(T) and T >= 0):
        raise DegenerateInputError("T must be finite and >= 0")
    if T > sig.duration + 1e-9 * sig.dt:
        raise DegenerateInputError(
            f"T = {T:g} exceeds signal duration {sig.duration:g}"
        )
    m = int(round(T / sig.dt))
    if m < 1:
        raise DegenerateInputError("T must cover at least one step")
    return min(m, len(sig) - 1)


def _check_same_grid(a: Signal, b: Signal) -> None:
    if abs(a.dt - b.dt) > 1e-12 * a.dt:
        raise DegenerateInputError("signals have mismatched sample steps")


def _trapezoid(vals: np.ndarray, dt: float) -> float:
    return dt * (float(np.sum(vals)) - 0.5 * (float(vals[0]) + float(vals[-1])))


def l2_norm_T(sig: Signal, T: float) -> float:
    """Truncated L2 norm ``sqrt(int_0^T y(t)**2 dt)`` (trapezoidal)."""
    m = _index_for(sig, T)
    v = sig.samples[: m + 1]
    return math.sqrt(max(_trapezoid(v * v, sig.dt), 0.0))


def inner_product_T(a: Signal, b: Signal, T: float) -> float:
    """Truncated inner product ``int_0^T a(t) b(t) dt`` (trapezoidal)."""
    _check_same_grid(a, b)
    m = min(_index_for(a, T), _index_for(b, T))
    va = a.samples[: m + 1]
    vb = b.samples[: m + 1]
    return _trapezoid(va * vb, a.dt)


def angle_T(a: Signal, b: Signal, T: float) -> float:
    """Angle between truncations in L2[0, T]; 0 when either norm vanishes."""
    na = l2_norm_T(a, T)
    nb = l2_norm_T(b, T)
    if na == 0.0 or nb == 0.0:
        return 0.0
    c = inner_product_T(a, b, T) / (na * nb)
    return math.acos(max(-1.0, min(1.0, c)))


# ---------------------------------------------------------------------------
# Empirical passivity verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OspEmpiricalReport:
    """Outcome of sampled output-strict-passivity checks.

    ``passed`` means every (input, horizon) pair satisfied
    ``||y||_T**2 <= gamma <u,y>_T + eps`` with the discretization slack
    ``eps = 1e-6 (1 + ||u||_T**2)``. ``worst_margin`` is the minimum of
    ``rhs + eps - lhs``. ``angle_form_agrees`` reports whether the
    equivalent angle-form inequality gave the same verdict everywhere.
    """

    passed: bool
    worst_margin: float
    worst_input: int
    worst_T: float
    angle_form_agrees: bool
    n_checks: int


def verify_osp_empirically(
    block, gamma: float, inputs, T_grid
) -> OspEmpiricalReport:
    """Check the OSP inequality for one block over sampled inputs and horizons."""
    if not (math.isfinite(gamma) and gamma >= 0):
        raise DegenerateInputError("gamma must be finite and >= 0")
    T_grid = [float(T) for T in T_grid]
    if not T_grid:
        raise DegenerateInputError("need at least one horizon")
    passed = True
    agree = True
    worst = math.inf
    worst_i = -1
    worst_T = float("nan")
    n_checks = 0
    for idx, u in enumerate(inputs):
        y = simulate_open_loop(block, u, zero_init=True)
        for T in T_grid:
            nu2 = l2_norm_T(u, T) ** 2
            ny = l2_norm_T(y, T)
            ip = inner_product_T(u, y, T)
            eps = 1e-6 * (1.0 + nu2)
            lhs = ny * ny
            rhs = gamma * ip
            ok = lhs <= rhs + eps
            # angle form: ||y|| <= gamma ||u|| cos(theta), same slack
            nu = math.sqrt(nu2)
            if ny == 0.0:
                ok_angle = True
            else:
                cos_t = math.cos(angle_T(u, y, T))
                ok_angle = lhs <= gamma * nu * ny * cos_t + eps
            margin = rhs + eps - lhs
            n_checks += 1
            if margin < worst:
                worst, worst_i, worst_T = margin, idx, T
            passed &= ok
            agree &= ok == ok_angle
    return OspEmpiricalReport(
        passed=passed,
        worst_margin=worst,
        worst_input=worst_i,
        worst_T=worst_T,
        angle_form_agrees=agree,
        n_checks=n_checks,
    )


@dataclass(frozen=True)
class GainRatioReport:
    """Empirical input-output gain of a closed loop across horizons.

    ``max_ratio`` is ``max_T ||y_n||_T / ||u||_T`` over usable horizons
    (those with ``||u||_T >= 1e-12``). ``realized_kappa`` and
    ``realized_alpha`` are the loop-contraction diagnostics at the final
    horizon when block gains are available: alpha is the product of gains
    and interior-angle cosines, kappa folds in the closing angle; neither is
    a certified bound.
    """

    max_ratio: float
    ratios: tuple[tuple[float, float], ...]
    skipped_T: tuple[float, ...]
    realized_alpha: float | None
    realized_kappa: float | None
    assumptions: tuple[str, ...] = (WELL_POSEDNESS_NOTE,)


def _block_gains(blocks) -> list[float] | None:
    gains = []
    for b in blocks:
        if isinstance(b, RationalTransfer):
            cert = secant_gain(b)
            if not math.isfinite(cert.gamma):
                return None
            gains.append(cert.gamma)
        elif isinstance(b, (MichaelisMenten, LinearGain)):
            gains.append(static_gain(b))
        elif isinstance(b, FirstOrderBlock):
            gains.append(b.beta / b.alpha)
        else:
            return None
    return gains


def empirical_gain_ratio(blocks, u: Signal, T_grid, gains=None) -> GainRatioReport:
    """Measure ``||y_n||_T / ||u||_T`` for a closed loop across horizons."""
    blocks = list(blocks)
    ys = simulate_closed_loop(blocks, u, zero_init=True)
    yn = ys[-1]
    ratios = []
    skipped = []
    for T in (float(T) for T in T_grid):
        nu = l2_norm_T(u, T)
        if nu < 1e-12:
            skipped.append(T)
            continue
        ratios.append((T, l2_norm_T(yn, T) / nu))
    if not ratios:
        raise DegenerateInputError("no horizon had usable input energy")

    alpha = kappa = None
    if gains is None:
        gains = _block_gains(blocks)
    if gains is not None:
        T_last = ratios[-1][0]
        e = Signal(u.samples - yn.samples, u.dt)
        cos_chain = 1.0
        for prev, cur in zip(ys, ys[1:]):
            cos_chain *= math.cos(angle_T(prev, cur, T_last))
        alpha = math.prod(gains) * cos_chain
        kappa = alpha * math.cos(angle_T(e, ys[0], T_last))
    return GainRatioReport(
        max_ratio=max(r for _, r in ratios),
        ratios=tuple(ratios),
        skipped_T=tuple(skipped),
        realized_alpha=alpha,
        realized_kappa=kappa,
    )


# ---------------------------------------------------------------------------
# Equilibrium shifting for inhibitory feedback
# ---------------------------------------------------------------------------


def _dynamics_matrices(dynamics) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(dynamics, FirstOrderBlock):
        return np.array([[-dynamics.alpha]]), np.array([dynamics.beta])
    if isinstance(dynamics, LinearBlockSS):
        return dynamics.A, dynamics.B
    raise DegenerateInputError("dynamics must be a first-order or state-space block")


def find_inhibitory_equilibrium(dynamics, M: float, K: float) -> np.ndarray:
    """Equilibrium of ``x' = A x + B M/(K + x_n)``.

    Solving ``A x = -B u*`` gives ``x = xi u*`` with ``xi = -A^{-1} B``, so
    the last coordinate satisfies the scalar quadratic
    ``x_n (K + x_n) = xi_n M`` solved in closed form (positive branch).
    """
    if not (M > 0 and K > 0):
        raise DegenerateInputError("inhibitory feedback needs M > 0 and K > 0")
    A, B = _dynamics_matrices(dynamics)
    try:
        xi = np.linalg.solve(A, -B)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("dynamics matrix is singular") from exc
    c = float(xi[-1])
    disc = K * K + 4.0 * c * M
    if disc < 0:
        raise ConvergenceError("no real equilibrium for this inhibitory loop")
    x_n = 0.5 * (-K + math.sqrt(disc))
    u_star = M / (K + x_n)
    return xi * u_star


class ShiftedSystem:
    """Inhibitory feedback loop rewritten around its equilibrium.

    The original loop is ``x' = A x + B M/(K + x_n)``; with ``z = x - x*``
    the dynamics stay ``z' = A z + B v`` and the feedback becomes
    ``v = -l(z_n)`` with the saturating nonlinearity
    ``l(r) = V r / (K + x*_n + r)``, ``V = M/(K + x*_n)`` (the offset
    ``a`` is the equilibrium coordinate ``x*_n``, so the shifted state
    ranges over ``z_n >= -x*_n`` exactly when the original stays
    nonnegative). Construction verifies the equilibrium residual
    ``|A x* + B M/(K + x*_n)| <= 1e-9``.
    """

    __slots__ = ("A", "B", "M", "K", "x_star", "nonlinearity")

    RESIDUAL_TOL = 1e-9

    def __init__(self, A, B, M: float, K: float, x_star):
        A = np.array(A, dtype=float)
        B = np.array(B, dtype=float).reshape(-1)
        x_star = np.array(x_star, dtype=float).reshape(-1)
        if A.shape != (len(x_star), len(x_star)) or B.shape != x_star.shape:
            raise DegenerateInputError("A, B, x_star dimensions disagree")
        if not (M > 0 and K > 0):
            raise DegenerateInputError("inhibitory feedback needs M > 0 and K > 0")
        xn = float(x_star[-1])
        if xn < 0:
            raise DegenerateInputError("equilibrium output coordinate must be >= 0")
        if K + xn <= 0:
            raise DegenerateInputError("equilibrium leaves the feedback domain")
        residual = A @ x_star + B * (M / (K + xn))
        if float(np.max(np.abs(residual))) > self.RESIDUAL_TOL:
            raise DegenerateInputError(
                f"x_star is not an equilibrium (residual {np.max(np.abs(residual)):.3g})"
            )
        nl = MichaelisMenten(V=M / (K + xn), K=K, a=xn)
        for m in (A, B, x_star):
            m.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "M", float(M))
        object.__setattr__(self, "K", float(K))
        object.__setattr__(self, "x_star", x_star)
        object.__setattr__(self, "nonlinearity", nl)

    def __setattr__(self, name, value):
        raise AttributeError("ShiftedSystem is immutable")

    @property
    def order(self) -> int:
        return len(self.x_star)

    @staticmethod
    def _rk4_scalar(fs, x0: float, T: float, dt: float) -> np.ndarray:
        # plain float arithmetic, no per-stage array allocation
        n_steps = int(round(T / dt))
        out = np.empty((n_steps + 1, 1))
        x = x0
        for k in range(n_steps + 1):
            out[k, 0] = x
            if k == n_steps:
                break
            k1 = fs(x)
            k2 = fs(x + 0.5 * dt * k1)
            k3 = fs(x + 0.5 * dt * k2)
            k4 = fs(x + dt * k3)
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if abs(x) > STATE_BOUND:
                raise SimulationDivergedError(
                    f"state exceeded {STATE_BOUND:g}", t_abort=(k + 1) * dt
                )
        return out

    def _rk4_vector(self, f, x0: np.ndarray, T: float, dt: float) -> np.ndarray:
        n_steps = int(round(T / dt))
        out = np.empty((n_steps + 1, self.order))
        x = np.array(x0, dtype=float)
        for k in range(n_steps + 1):
            out[k] = x
            if k == n_steps:
                break
            k1 = f(x)
            k2 = f(x + 0.5 * dt * k1)
            k3 = f(x + 0.5 * dt * k2)
            k4 = f(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if float(np.max(np.abs(x))) > STATE_BOUND:
                raise SimulationDivergedError(
                    f"state exceeded {STATE_BOUND:g}", t_abort=(k + 1) * dt
                )
        return out

    def simulate_original(self, x0, T: float, dt: float = DEFAULT_DT) -> np.ndarray:
        """Trajectory of ``x' = A x + B M/(K + x_n)`` from ``x0``."""
        A, B, M, K = self.A, self.B, self.M, self.K
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        if self.order == 1:
            a = float(A[0, 0])
            b = float(B[0])
            return self._rk4_scalar(
                lambda x: a * x + b * (M / (K + x)), float(x0[0]), T, dt
            )

        def f(x):
            return A @ x + B * (M / (K + x[-1]))

        return self._rk4_vector(f, x0, T, dt)

    def simulate_shifted(self, z0, T: float, dt: float = DEFAULT_DT) -> np.ndarray:
        """Trajectory of ``z' = A z - B l(z_n)`` from ``z0``."""
        A, B = self.A, self.B
        nl = self.nonlinearity
        z0 = np.asarray(z0, dtype=float).reshape(-1)
        if self.order == 1:
            a = float(A[0, 0])
            b = float(B[0])
            V, Ka = nl.V, nl.K + nl.a
            return self._rk4_scalar(
                lambda z: a * z - b * (V * z / (Ka + z)), float(z0[0]), T, dt
            )

        def f(z):
            return A @ z - B * nl(float(z[-1]))

        return self._rk4_vector(f, z0, T, dt)


def shift_equilibrium(dynamics, x_star, M: float, K: float) -> ShiftedSystem:
    """Rewrite an inhibitory-feedback loop around the equilibrium ``x_star``.

    ``dynamics`` supplies the linear part (first-order or state-space
    block); the inhibitory output feedback is ``u = M/(K + x_n)``. The
    shifted loop keeps the same (A, B) and gets the saturating static
    output block with ``V = M/(K + x*_n)``, offset ``a = x*_n`` and
    unchanged ``K``, so its sector gain is ``V/K``. The equilibrium
    property is verified at construction (residual below 1e-9).
    """
    A, B = _dynamics_matrices(dynamics)
    return ShiftedSystem(A, B, M, K, np.asarray(x_star, dtype=float).reshape(-1))
