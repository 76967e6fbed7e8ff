"""Request/response models for the HTTP service and the CLI's JSON output.

Gains and thresholds can be +inf, which strict JSON cannot carry, so every
possibly-infinite number crosses the wire as an ExtendedReal pair. All
response models echo the defining inputs back.
"""

from __future__ import annotations

import math
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field


class ExtendedReal(BaseModel):
    """A real number or +inf: {"value": 4.0, "infinite": false}."""

    value: Optional[float] = None
    infinite: bool = False

    @classmethod
    def wrap(cls, x: float) -> "ExtendedReal":
        if math.isinf(x):
            return cls(value=None, infinite=True)
        return cls(value=x, infinite=False)

    def unwrap(self) -> float:
        if self.infinite:
            return math.inf
        if self.value is None:
            raise ValueError("ExtendedReal carries neither a value nor inf")
        return self.value


class TransferInput(BaseModel):
    """Polynomial coefficients in ascending order, matching the CLI format."""

    num: list[float]
    den: list[float]


class RationalBlockModel(BaseModel):
    type: Literal["rational"] = "rational"
    num: list[float]
    den: list[float]


class MichaelisMentenBlockModel(BaseModel):
    type: Literal["mm"] = "mm"
    V: float
    K: float
    a: float = 0.0


class GainBlockModel(BaseModel):
    type: Literal["gain"] = "gain"
    k: float


BlockModel = Annotated[
    Union[RationalBlockModel, MichaelisMentenBlockModel, GainBlockModel],
    Field(discriminator="type"),
]


# -- gain ------------------------------------------------------------------


class GainRequest(BaseModel):
    num: list[float]
    den: list[float]
    full: bool = False


class OspView(BaseModel):
    holds: bool
    status: str


class SprView(BaseModel):
    is_spr: bool
    failed: Optional[str] = None


class GainResponse(BaseModel):
    input: TransferInput
    secant_gain: ExtendedReal
    attained_at_infinity: bool
    witness_omega: Optional[float] = None
    degenerate: bool = False
    reason: Optional[str] = None
    hinf_gain: ExtendedReal
    hinf_witness_omega: Optional[float] = None
    osp: Optional[OspView] = None
    spr: Optional[SprView] = None


# -- spr -------------------------------------------------------------------


class SprRequest(BaseModel):
    num: list[float]
    den: list[float]


class SprResponse(BaseModel):
    input: TransferInput
    is_spr: bool
    failed: Optional[str] = None


# -- cascade ---------------------------------------------------------------


class CascadeRequest(BaseModel):
    blocks: list[BlockModel]


class CascadeResponse(BaseModel):
    blocks: list[BlockModel]
    gains: list[float]
    product_gain: float
    threshold: ExtendedReal
    passes: bool
    boundary: bool
    margin: ExtendedReal
    closed_loop_stable: Optional[bool] = None


# -- matrix ----------------------------------------------------------------


class MatrixRequest(BaseModel):
    alphas: list[float]
    betas: list[float]


class MatrixResponse(BaseModel):
    alphas: list[float]
    betas: list[float]
    stable: bool
    marginal: bool
    char_poly: list[float]
    gain_product: float
    threshold: ExtendedReal
    at_secant_boundary: bool
    verdict: str


# -- simulate --------------------------------------------------------------


class StepInputModel(BaseModel):
    type: Literal["step"] = "step"
    amplitude: float = 1.0


class PulseInputModel(BaseModel):
    type: Literal["pulse"] = "pulse"
    amplitude: float = 1.0
    width: float = 1.0


class SinusoidsInputModel(BaseModel):
    type: Literal["sinusoids"] = "sinusoids"
    seed: int = 0
    n_components: int = 8
    freq_lo: float = 1e-2
    freq_hi: float = 1e2


class ChirpInputModel(BaseModel):
    type: Literal["chirp"] = "chirp"
    omega0: float
    omega1: float
    amplitude: float = 1.0
    taper: float = 0.1


class SamplesInputModel(BaseModel):
    type: Literal["samples"] = "samples"
    samples: list[float]


class CsvInputModel(BaseModel):
    type: Literal["csv"] = "csv"
    path: str


InputModel = Annotated[
    Union[
        StepInputModel,
        PulseInputModel,
        SinusoidsInputModel,
        ChirpInputModel,
        SamplesInputModel,
        CsvInputModel,
    ],
    Field(discriminator="type"),
]


class ScenarioModel(BaseModel):
    """On-disk scenario format: blocks + input + dt + T."""

    blocks: list[BlockModel]
    input: InputModel
    dt: float
    T: float


class SignalModel(BaseModel):
    dt: float
    samples: list[float]


class SimulateSummary(BaseModel):
    T: float
    dt: float
    diverged: bool
    t_abort: Optional[float] = None
    l2_norms: list[float]
    final_values: list[float]
    input_l2_norm: float
    max_gain_ratio: Optional[float] = None
    assumptions: list[str]


class SimulateRequest(BaseModel):
    scenario: ScenarioModel


class SimulateResponse(BaseModel):
    scenario: ScenarioModel
    outputs: list[SignalModel]
    input_signal: SignalModel
    summary: SimulateSummary


# -- nyquist ---------------------------------------------------------------


class NyquistRequest(BaseModel):
    num: list[float]
    den: list[float]
    gamma: Optional[float] = None


class ViolationPoint(BaseModel):
    omega: float
    re: float
    im: float
    excess: float


class NyquistResponse(BaseModel):
    input: TransferInput
    gamma: ExtendedReal
    gamma_is_default: bool
    n_points: int
    violations: list[ViolationPoint]
    csv: str
    svg: str
